use std::path::PathBuf;

use serde_json::json;

use csei_core::{Error, Stage, StageError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {message}")]
    Config { message: String },

    #[error("input file not found: {}", path.display())]
    MissingInput { key: &'static str, path: PathBuf },

    #[error("output directory {} is locked by another run ({})", path.display(), lock.display())]
    Locked { path: PathBuf, lock: PathBuf },

    #[error(transparent)]
    Stage(#[from] StageError),
}

impl CliError {
    pub fn stage(stage: Stage, source: Error) -> Self {
        CliError::Stage(StageError { stage, source })
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::MissingInput { .. } => 2,
            CliError::Locked { .. } | CliError::Stage(_) => 1,
        }
    }

    /// One-line JSON record written to stderr.
    pub fn record(&self) -> serde_json::Value {
        let body = match self {
            CliError::Config { message } => json!({
                "kind": "config",
                "message": message,
            }),
            CliError::MissingInput { key, path } => json!({
                "kind": "missing_input",
                "key": key,
                "path": path.display().to_string(),
                "message": self.to_string(),
            }),
            CliError::Locked { path, lock } => json!({
                "kind": "locked",
                "path": path.display().to_string(),
                "lock": lock.display().to_string(),
                "message": self.to_string(),
            }),
            CliError::Stage(e) => {
                let mut v = json!({
                    "kind": e.source.kind(),
                    "stage": e.stage.name(),
                    "message": e.source.to_string(),
                });
                if let Error::Io { path, .. } = &e.source {
                    v["path"] = json!(path.display().to_string());
                }
                v
            }
        };
        json!({ "error": body, "exit_code": self.exit_code() })
    }
}
