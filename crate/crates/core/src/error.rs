use thiserror::Error;

/// Failures raised by the library. Verification outcomes are never errors;
/// they are reported through [`crate::VerificationReport`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested computation exceeds a configured resource cap.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A documented precondition on the input data does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
