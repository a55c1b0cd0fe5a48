use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("tensor order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("unsupported tensor order {0} (supported: 0..=4)")]
    UnsupportedOrder(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("out of domain: {0}")]
    OutOfDomain(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("window violated: {0}")]
    WindowViolation(String),

    #[error("group/parameter mismatch: {0}")]
    GroupMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
