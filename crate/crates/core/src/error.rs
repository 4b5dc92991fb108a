use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is nearly singular (estimated reciprocal condition {rcond:e}): {context}")]
    NearSingular { rcond: f64, context: String },

    #[error("size limit exceeded: {what} = {got}, limit {limit}")]
    SizeLimitExceeded {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("outside the domain of the formula: {0}")]
    DomainError(String),

    #[error("missing correlation value for subset {0:?}")]
    MissingSubset(Vec<usize>),

    #[error("root finding failed: {0}")]
    RootFindingFailed(String),

    #[error("observation window too large: {0}")]
    WindowTooLarge(String),

    #[error("insufficient degree: {0}")]
    InsufficientDegree(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short variant name, used by front ends to report which failure occurred.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::NearSingular { .. } => "NearSingular",
            Error::SizeLimitExceeded { .. } => "SizeLimitExceeded",
            Error::DomainError(_) => "DomainError",
            Error::MissingSubset(_) => "MissingSubset",
            Error::RootFindingFailed(_) => "RootFindingFailed",
            Error::WindowTooLarge(_) => "WindowTooLarge",
            Error::InsufficientDegree(_) => "InsufficientDegree",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
