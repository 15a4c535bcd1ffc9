use thiserror::Error;

/// Errors produced by the numerical kernels and the verification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),

    #[error("index out of range: {what}")]
    IndexOutOfRange { what: String },

    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is numerically singular")]
    Singular,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse complex scalar from {0:?}")]
    ParseComplex(String),

    #[error("no usable sample points: {0}")]
    DegenerateSweep(String),

    #[error("iteration did not converge: {0}")]
    NotConverged(String),

    #[error("point is off the zero fiber: |phi| = {phi_abs:.3e}")]
    OffFiber { phi_abs: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
