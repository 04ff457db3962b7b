use thiserror::Error;

use crate::geom::SurfaceKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("chart point out of range: {0}")]
    OutOfChart(String),

    #[error("{op} is not supported on the {surface}")]
    Unsupported { surface: SurfaceKind, op: &'static str },

    #[error("modes do not share one eigenvalue ({0} vs {1})")]
    MixedEigenvalue(f64, f64),

    #[error("spectral truncation: {0}")]
    Truncation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("point outside the tube: sqrt(rho) = {rho} > {eps}")]
    OutsideTube { rho: f64, eps: f64 },

    #[error("symmetry test failed: {0}")]
    Symmetry(String),

    #[error("level {level} is near the critical value {critical}")]
    NearCritical { level: f64, critical: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
