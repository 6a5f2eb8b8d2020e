use alloc::string::String;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("imaginary part is not positive definite (smallest eigenvalue {min_eig:e}, tolerance {tol:e})")]
    NotHerglotz { min_eig: f64, tol: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("condition estimate {cond:e} exceeds the limit {limit:e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("Schur pivot is numerically zero (|c_nn| = {0:e})")]
    SingularPivot(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("unsupported dimension {n} (supported: 1..={max})")]
    UnsupportedDimension { n: usize, max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("estimation failed: {0}")]
    EstimationFailed(String),
}

pub type Result<T> = core::result::Result<T, Error>;
