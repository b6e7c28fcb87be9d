use thiserror::Error;

use crate::lattice::Position;
use crate::rules::ValidationReport;

#[derive(Debug, Error)]
pub enum TuredoError {
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("invalid spec:\n{0}")]
    Validation(ValidationReport),
    #[error("rotation error: {0}")]
    Rotation(String),
    #[error("invalid dividing path: {0}")]
    Path(String),
    #[error("seed not admissible: {0}")]
    Seed(String),
    #[error("reconstruction failed at step {step}: {reason}")]
    Reconstruction { step: u64, reason: String },
    #[error("render error: {0}")]
    Render(String),
    #[error("position {0} out of range")]
    OutOfRange(Position),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = TuredoError> = std::result::Result<T, E>;
