use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("objective undefined: {0}")]
    UndefinedObjective(String),

    #[error("model is not positive definite at these locations (jitter up to {max_jitter:e} failed)")]
    NotPositiveDefinite { max_jitter: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

impl Error {
    /// Coarse category used by front ends to pick exit codes.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidParameter(_) => ErrorCategory::Config,
            Error::Data(_) => ErrorCategory::Data,
            Error::Range(_)
            | Error::Convergence(_)
            | Error::UndefinedObjective(_)
            | Error::NotPositiveDefinite { .. }
            | Error::Eigen(_) => ErrorCategory::Numerical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Numerical,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
