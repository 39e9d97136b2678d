//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the geometry and linear-algebra layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max asymmetry {defect:e}, tolerance {tol:e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("eigensolver failed to converge for dimension {dim} (condition estimate {cond:e})")]
    EigenFailure { dim: usize, cond: f64 },

    #[error("scalar function `{name}` undefined at {value:e}")]
    ScalarDomain { name: String, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("iteration budget exhausted after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("unknown check name `{0}`")]
    UnknownCheck(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
