//! Linear and small dense semidefinite solvers used by every bound.

pub mod lp;
pub mod sdp;

pub use lp::{solve_lp, solve_lp_with, LpOptions, LpProblem, LpSolution, LpStatus, RowSense, Sense};
pub use sdp::{
    guessing_probability, solve_guessing_sdp, solve_guessing_sdp_with, SdpDiscriminationProblem,
    SdpOptions, SdpSolution,
};
