use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field contains non-finite values")]
    NonFinite,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("vorticity must be mean-free (mean = {mean:e})")]
    NonzeroMean { mean: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series error: {0}")]
    Series(String),

    #[error("criterion `{criterion}` is unsupported for model `{model}`: {reason}")]
    Unsupported {
        criterion: String,
        model: String,
        reason: String,
    },

    #[error("configuration is invalid:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
