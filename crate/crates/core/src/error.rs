use thiserror::Error;

/// Errors raised by the urn computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The request exceeds a configured resource limit.
    #[error("resource limit exceeded: {what} (largest feasible value: {max_feasible})")]
    Resource { what: String, max_feasible: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
