use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("hermitian eigensolver did not converge (matrix norm {norm})")]
    SolverFailure { norm: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("point ({re}, {im}) lies outside the numerical range (margin {margin:e})")]
    OutsideRange { re: f64, im: f64, margin: f64 },

    #[error("dual solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("eigenvalue branch tracking failed near theta = {theta}")]
    TrackingFailure { theta: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
