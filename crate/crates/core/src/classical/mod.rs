//! Classical strategies and the information-restricted classical polytope.

mod polytope;
mod strategy;

pub use polytope::{
    affine_rank, check_inequality, classical_witness_bound, min_info_membership, restricted_vertices,
    vertices, ClassicalPolytope, InequalityReport, Membership, RestrictedPoint, Vertex, WitnessBound,
    BOUND_TOL,
};
pub use strategy::{
    enumerate_strategies, remap_to_n_symbols, strategy_behavior, strategy_count, strategy_guessing,
    DeterministicStrategy, StrategyIter, DEFAULT_STRATEGY_BUDGET,
};
