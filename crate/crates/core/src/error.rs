use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum KgmpError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("grid mismatch: field has {found} values, grid has {expected} nodes")]
    GridMismatch { expected: usize, found: usize },

    #[error("operator not invertible: pivot {pivot:e} at row {row}")]
    NotInvertible { row: usize, pivot: f64 },

    #[error("no negative endpoint found below scale {scale_max}")]
    NoNegativeEndpoint { scale_max: f64 },

    #[error("outside theorem hypotheses: {0}")]
    HypothesisViolated(String),

    #[error("no convergence after {iterations} iterations (last gradient norm {grad_norm:e})")]
    NoConvergence {
        iterations: usize,
        grad_norm: f64,
        level_history: Vec<f64>,
    },

    #[error("newton diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("solution rejected: {0}")]
    Rejected(String),
}

pub type Result<T> = std::result::Result<T, KgmpError>;
