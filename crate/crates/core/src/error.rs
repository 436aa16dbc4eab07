use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A product of dimensions exceeded the configured cap.
    #[error("dimension {requested} exceeds cap {cap}")]
    Size { requested: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An input violated a documented precondition (non-Hermitian, unnormalized, ...).
    #[error("contract violated: {0}")]
    Contract(String),

    #[error("usage: {0}")]
    Usage(String),

    /// The operator carries a global phase; strip it (CPT^2 = 1) before sector analysis.
    #[error("operator is not an involution (max |U^2 - 1| = {deviation:.3e}); strip the global phase first")]
    PhaseNotStripped { deviation: f64 },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
