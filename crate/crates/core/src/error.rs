use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("need at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("asymmetric entries at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("negative entry at ({0}, {1})")]
    Negative(usize, usize),
    #[error("nonzero diagonal entry at {0}")]
    NonZeroDiagonal(usize),
    #[error("zero distance between distinct points {0} and {1}")]
    ZeroDistance(usize, usize),
    #[error("tied distances: pairs {0:?} and {1:?}")]
    Ties((usize, usize), (usize, usize)),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coincident image points {0} and {1}")]
    Coincident(usize, usize),
    #[error("digraph vertex {vertex} has out-degree {degree}, expected 1")]
    OutDegree { vertex: usize, degree: usize },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("retry budget exhausted: {0}")]
    RetriesExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;
