use thiserror::Error;

/// Errors raised by the verification engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what}: requested {requested} exceeds the capacity limit of {cap}")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("chain is not reversible: {0}")]
    NotReversible(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("iterative eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
