use std::path::PathBuf;

/// Errors raised by the lab.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: String,
    },

    #[error("unsupported dimension {0} (this operation supports {1})")]
    UnsupportedDimension(usize, &'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("quadrature did not converge for {what}: last change {last_change:.3e}, tolerance {tolerance:.3e}, {nodes} nodes")]
    Quadrature {
        what: String,
        last_change: f64,
        tolerance: f64,
        nodes: usize,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, value: impl ToString, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            reason: reason.into(),
        }
    }
}
