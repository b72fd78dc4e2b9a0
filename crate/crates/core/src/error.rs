use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the pipeline stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("ingestion error: {0}")]
    Ingest(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("data error for post {id}: {message}")]
    Data { id: String, message: String },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Ingest(_) => "ingest",
            Error::Schema(_) => "schema",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
            Error::Data { .. } => "data",
            Error::Degenerate(_) => "degenerate",
            Error::DimensionMismatch { .. } => "dimension",
            Error::InvalidParameter(_) => "parameter",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
