use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {op} got {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not hermitian (|M - M*|_F = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("invalid entry count: expected {expected}, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("invalid block structure: {0}")]
    InvalidBlock(String),
    #[error("negative discriminant {value:e} at theta = {theta}")]
    NegativeDiscriminant { theta: f64, value: f64 },
    #[error("need at least {min} samples, got {got}")]
    InsufficientSamples { min: usize, got: usize },
    #[error("sample count must be even, got {0}")]
    OddSampleCount(usize),
    #[error("coefficients do not describe an ellipse: c = {c}, sqrt(a^2+b^2) = {r}")]
    NotAnEllipse { c: f64, r: f64 },
    #[error("ellipse hull is empty")]
    EmptyHull,
    #[error("trigonometric fit is rank deficient")]
    DegenerateFit,
    #[error("ellipses are not co-centered")]
    NotCocentered,
    #[error("operation requires lower block size 2, got {0}")]
    WrongBlockSize(usize),
    #[error("report lacks the witness needed: {0}")]
    MissingWitness(&'static str),
    #[error("report carries no prediction")]
    NoPrediction,
}
