use thiserror::Error;

/// Errors raised by the geometry, sampling, oracle and suite layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The call is malformed (mismatched sizes, unsupported options, bad text forms).
    #[error("usage error: {0}")]
    Usage(String),
    /// The request lies outside the range where the closed-form result holds.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("report error: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}
