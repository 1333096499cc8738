use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// Request exceeds the configured size limits.
    #[error("capacity exceeded: {what} = {requested} (maximum {maximum})")]
    Capacity {
        what: &'static str,
        requested: usize,
        maximum: usize,
    },

    #[error("numerical method did not converge: {0}")]
    NonConvergence(String),

    #[error("out of range: {0}")]
    Range(String),

    /// Sampling parameters that produce a commensurate (low-entropy) phase sequence.
    #[error("degenerate phase step: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
