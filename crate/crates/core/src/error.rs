use thiserror::Error;

/// Errors produced by the coding, bound and flow-graph layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("division by zero in the field")]
    DivisionByZero,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("data corruption: {0}")]
    Corruption(String),

    #[error("unsupported failure pattern: {0}")]
    UnsupportedFailurePattern(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
