//! Scenario, behavior, operator and witness types, plus the elementary
//! formulas connecting them.

mod behavior;
mod operator;
mod scenario;
mod witness;

pub use behavior::{correlator, Behavior, PROB_TOL};
pub use operator::{
    behavior_from_quantum, HermitianOperator, MixedEnsemble, Povm, QuantumEnsemble, HERMITIAN_TOL,
    STATE_TOL,
};
pub use scenario::{hmin, InfoBudget, Scenario, PRIOR_TOL};
pub(crate) use scenario::validate_distribution;
pub use witness::{witness_value, AffineBound, Witness, WitnessFile};
