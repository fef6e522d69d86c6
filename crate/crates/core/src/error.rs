use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("functionals no longer span the field space")]
    SpanLost,
    #[error("precision matrix is not positive definite (pivot {pivot})")]
    SingularPrecision { pivot: usize },
    #[error("vertices {0} and {1} lie in different components")]
    Disconnected(usize, usize),
    #[error("mixture integral underflowed at x = {0}")]
    NumericalUnderflow(f64),
    #[error("W = U - V decreases by {drop:.3e} near x = {at} (tolerance {tol:.1e})")]
    DecompositionFails { at: f64, drop: f64, tol: f64 },
    #[error("only {found} tail points, need at least {needed}")]
    InsufficientExceedances { found: usize, needed: usize },
    #[error("{solver} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { solver: &'static str, iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
