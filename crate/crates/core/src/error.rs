use thiserror::Error;

/// Errors produced by the geometry, volume, bound and packing routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid space specification: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("frame is not orthonormal (max entry deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("tangent is not horizontal: {0}")]
    NotHorizontal(String),

    #[error("argument outside the domain: {0}")]
    DomainError(String),

    #[error("iteration did not converge: {0}")]
    NotConverged(String),

    #[error("series diverges: {0}")]
    Divergent(String),

    #[error("phase decomposition residual {0:.3e} exceeds 1e-6")]
    DecompositionResidual(f64),

    #[error("codebook has too few points ({0}); at least 2 are required")]
    TooFewPoints(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
