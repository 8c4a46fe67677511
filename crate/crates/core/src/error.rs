use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("condition violation: {0}")]
    ConditionViolation(String),
    #[error("multiplier upper bound too small: {0}")]
    BoundTooSmall(String),
    #[error("infeasible first-stage decision: {0}")]
    InfeasibleDecision(String),
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
