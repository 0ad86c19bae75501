use thiserror::Error;

/// Errors produced by model construction, certification, and simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched or invalid dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An argument was outside its documented domain.
    #[error("argument error: {0}")]
    Argument(String),

    /// Operation applied to a system class it does not support.
    #[error("unsupported system class: {0}")]
    Unsupported(String),

    /// A black-box mode was used without declared bounding data.
    #[error("mode {0} has no declared bounding data")]
    MissingBounds(usize),

    /// A candidate vector or stored certificate failed validation.
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    /// Trajectory norm exceeded the blow-up threshold or became non-finite.
    #[error("trajectory diverged at t = {t} (sup-norm {norm:.3e})")]
    Divergence { t: f64, norm: f64 },

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
