use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A distribution parameter record violates its invariants.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Quadrature size outside the supported range.
    #[error("invalid quadrature size {n}: must be in 1..={max}")]
    Size { n: usize, max: usize },

    /// The result cannot be represented as a finite, normal `f64`.
    #[error("range error: {0}")]
    Range(String),

    /// The requested moment generating function argument lies outside its domain.
    #[error("divergence: {0}")]
    Divergence(String),

    /// An iterative method did not converge. `partial` holds the last estimate.
    #[error("convergence failure: {message} (partial estimate {partial})")]
    Convergence { message: String, partial: f64 },
}

impl Error {
    /// Short machine-readable identifier of the error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Parameter(_) => "parameter",
            Error::Size { .. } => "size",
            Error::Range(_) => "range",
            Error::Divergence(_) => "divergence",
            Error::Convergence { .. } => "convergence",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
