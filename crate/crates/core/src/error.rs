use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid derivative series: {0}")]
    InvalidSeries(String),

    #[error("operation requires an odd function (f has {0} parity)")]
    NotOdd(&'static str),

    #[error("series index k = {0} must be a positive odd integer")]
    InvalidOrder(i64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not positive-definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("precision is not of the near-identity form I + B: {0}")]
    NotNearIdentity(String),

    #[error("graph parameters out of range: {0}")]
    InvalidGraph(String),

    #[error("failed to parse matrix: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
