//! Limits on prepare-and-measure correlations when the one-shot accessible
//! information of the communication is bounded.
//!
//! * [`model`]: scenarios, behaviors, ensembles, POVMs and witnesses.
//! * [`optim`]: the simplex and guessing-probability SDP solvers.
//! * [`classical`]: deterministic strategies and the information-restricted
//!   classical polytope.
//! * [`quantum`]: information of ensembles and quantum witness values.
//! * [`dibound`]: theory-independent information bounds.
//! * [`rac`]: random access codes and the entanglement-assisted simulation.
//! * [`random`]: samplers for states, ensembles, measurements and behaviors.
//! * [`cli`]: the `infocorr` command line.

pub mod error;
pub mod linalg;
pub mod model;
pub mod optim;
pub mod classical;
pub mod random;
pub mod quantum;
pub mod dibound;
pub mod rac;
pub mod cli;

pub use error::{Error, Result};
