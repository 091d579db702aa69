use thiserror::Error;

/// Errors raised by the closed forms, the concurrence routines and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (non-finite time,
    /// coinciding sites, a density matrix that is not Hermitian or PSD, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation was called with an incompatible combination of inputs,
    /// e.g. a B1 routine handed an unentangled initial state.
    #[error("usage error: {0}")]
    Usage(String),

    /// A numerical procedure failed to reach its accuracy target.
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
