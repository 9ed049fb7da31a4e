use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported scenario: {0}")]
    UnsupportedScenario(String),

    #[error("enumeration needs {required} strategies but the budget is {budget}")]
    Capacity { required: u128, budget: u128 },

    /// The solver ran out of iterations. `lower`/`upper` bracket the optimum
    /// as far as it got.
    #[error("{solver} did not converge: {reason} (best bounds [{lower}, {upper}])")]
    Convergence {
        solver: &'static str,
        reason: String,
        lower: f64,
        upper: f64,
    },

    #[error("simplex exceeded {pivots} pivots without terminating")]
    CyclingGuard { pivots: usize },

    #[error("parse error: {0}")]
    Parse(String),

    /// A `--check` re-verification disagreed with the computed result.
    #[error("check failed: {0}")]
    Check(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::Parse(_) => 3,
            Error::Capacity { .. } => 4,
            Error::Convergence { .. } | Error::CyclingGuard { .. } => 5,
            Error::InvalidInput(_) | Error::UnsupportedScenario(_) => 6,
            Error::Check(_) => 7,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
