//! Information carried by quantum ensembles and quantum strategies for
//! violating classical witnesses.

mod info;
mod seesaw;
mod strategy;

pub use info::{info_eigen_bound, info_of_ensemble, info_of_mixed, EigenBound};
pub use seesaw::{optimal_binary_measurements, seesaw_max_witness, SeesawOptions, SeesawResult, MAX_SEESAW_DIM};
pub use strategy::{
    analytic_f1_curve, constant_branch, e0_ensemble, e0_measurements, e0_with_relay, e0_with_silence, relay_branch,
    strategy_info_and_value, QuantumBranch, QuantumStrategy,
};
