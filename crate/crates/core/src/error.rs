use thiserror::Error;

/// Errors produced anywhere in the coreset pipeline.
#[derive(Debug, Error)]
pub enum CoresetError {
    #[error("dimension mismatch: expected dim={expected}, got dim={got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("outlier mass {requested} exceeds total weight {total}")]
    OutlierMassTooLarge { requested: f64, total: f64 },

    #[error("target size {target} is below the minimum feasible size {minimum}")]
    SizeTooSmall { target: usize, minimum: usize },

    #[error("instance too large for exhaustive enumeration: n={n}, limit={limit}")]
    TooLargeForOracle { n: usize, limit: usize },

    #[error("csv error at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoresetError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CoresetError {
    CoresetError::InvalidInput(msg.into())
}
