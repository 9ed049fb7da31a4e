//! Random access codes, their quantum realizations, and the simulation of
//! entanglement-assisted classical communication by quantum messages.

mod codes;
mod ea;

pub use codes::{
    build_paper_ensemble, first_bit_relay, qubit_rac_reference, rac_scenario, rac_score, target_bit, RacSpec,
    RacVariant,
};
pub use ea::{ea_behavior, ea_to_qc, random_ea_strategy, verify_ea_ceiling, EaReport, EaStrategy, EA_TOL};
