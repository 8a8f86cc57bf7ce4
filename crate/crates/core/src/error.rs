use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Resource and divergence failures are reported differently from bad input.
    pub fn is_resource_like(&self) -> bool {
        matches!(self, Error::Resource(_) | Error::Divergence(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
