use thiserror::Error;

/// Errors raised by the library.
///
/// The variants split into two families: input problems ([`Error::Domain`],
/// [`Error::Validation`], [`Error::Overflow`]) and numerical or mathematical
/// failures detected while computing (everything else). The CLI maps the first
/// family to exit code 2 and the second to exit code 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    /// Adaptive quadrature ran out of panels. `estimate` is the best value seen.
    #[error("quadrature did not converge within {panels} panels (estimate {estimate:e}, error {error:e})")]
    Convergence {
        estimate: f64,
        error: f64,
        panels: usize,
    },

    #[error("kernel is not admissible: {0}")]
    KernelAdmissibility(String),

    #[error("reciprocal series tail {tail:e} not below {target:e} by K = {k_max}")]
    Truncation { tail: f64, target: f64, k_max: usize },

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("identity violated: {0}")]
    IdentityViolation(String),
}

impl Error {
    /// True for errors caused by bad input rather than by a failed computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Validation(_) | Error::Overflow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
