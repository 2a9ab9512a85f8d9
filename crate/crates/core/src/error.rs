use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e}, allowed {allowed:.3e})")]
    NotHermitian { asymmetry: f64, allowed: f64 },

    #[error("matrix is not positive semidefinite (least eigenvalue {min_eigenvalue:.6e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("degenerate pencil: right-hand matrix is numerically zero")]
    DegeneratePencil,

    #[error("vector is zero")]
    ZeroVector,

    #[error("triplet ({0}, {1}, {2}) is not an admissible Schmidt rank for dims ({3}, {4}, {5})")]
    NotAdmissible(usize, usize, usize, usize, usize, usize),

    #[error("parameter must be positive, got {0}")]
    NonPositive(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
