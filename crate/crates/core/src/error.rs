use thiserror::Error;

/// Crate-wide error type. Numerical routines report failed preconditions as
/// `InvalidInput` and runtime breakdowns (divergent Newton iterations, singular
/// discretizations, degenerate conditioning events) through the other variants.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("convergence failure: {0}")]
    NoConvergence(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
