use thiserror::Error;

use crate::algebra::Violation;

/// Errors for algebra construction, spectral calculus and certificate runs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("block {block}: expected {dim}x{dim}, got {rows}x{cols}")]
    ShapeMismatch {
        block: usize,
        dim: usize,
        rows: usize,
        cols: usize,
    },

    #[error("expected {expected} blocks, got {got}")]
    BlockCountMismatch { expected: usize, got: usize },

    #[error("operators belong to different algebras")]
    AlgebraMismatch,

    #[error("operator is not hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("eigenvalue {eigenvalue:.6e} outside the domain of {function}")]
    DomainViolation { function: String, eigenvalue: f64 },

    #[error("support_not_dominated: omega's support leaks outside phi's support (residual {residual:.3e})")]
    SupportNotDominated { residual: f64 },

    #[error("operator is not positive semidefinite (eigenvalue {eigenvalue:.6e})")]
    NotPositive { eigenvalue: f64 },

    #[error("state is not normalised (trace {trace})")]
    NotNormalised { trace: f64 },

    #[error("invalid resolution of identity: {0:?}")]
    InvalidResolution(Vec<Violation>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("property violation: {0}")]
    PropertyViolation(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
