use thiserror::Error;

/// Errors surfaced by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid Jacobi parameters or function parameters.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// Argument outside the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An integrand is not integrable with the requested exponents.
    #[error("non-integrable: {0}")]
    NonIntegrable(String),
    /// A request exceeds the supported resource envelope.
    #[error("resource limit: {0}")]
    Resource(String),
    /// Too few usable samples for a fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
