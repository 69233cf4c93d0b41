use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("time index {index} out of range for {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unknown catalog key `{0}`")]
    UnknownCase(String),
    #[error("material is not symmetric positive definite: {0}")]
    NotSpd(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("time step {dt:e} exceeds stability limit {limit:e}")]
    Stability { dt: f64, limit: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("conjugate gradient breakdown: {0}")]
    CgBreakdown(String),
    #[error("empty search bracket: {0}")]
    EmptyBracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;
