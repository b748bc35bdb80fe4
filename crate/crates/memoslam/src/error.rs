//! Error types shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An API contract was violated (shape mismatch, stale cache, bad argument).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A gradient passed to the optimizer contained NaN or infinity.
    #[error("non-finite gradient at index {index} (value {value})")]
    NonFiniteGradient { index: usize, value: f64 },

    /// A query point fell outside the domain it must lie in.
    #[error("point ({0}, {1}, {2}) outside domain")]
    OutOfDomain(f64, f64, f64),

    /// Bad configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    /// A static-pixel sample was requested but the static set is empty.
    #[error("no static pixels with valid depth available")]
    EmptyStaticSet,

    /// Not enough data to compute a metric.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A dataset or checkpoint file could not be read or parsed.
    #[error("failed to load {path}: {reason}")]
    Load { path: PathBuf, reason: String },

    /// Numerical failure during optimization (non-finite loss).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn load(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Load {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
