use std::path::PathBuf;

use serde_json::json;

/// Failure of a CLI command, carrying its process exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] fidelab_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("artifact {path} failed validation: {reason}")]
    Artifact { path: PathBuf, reason: String },
    #[error("runs are not comparable: {0}")]
    Incomparable(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn kind(&self) -> &'static str {
        use fidelab_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Incomparable(_) => "validation",
            CliError::Core(E::Capacity { .. }) => "capacity",
            CliError::Core(E::NonConvergence(_)) => "non-convergence",
            CliError::Core(E::Degenerate(_)) => "degenerate-input",
            CliError::Core(_) => "validation",
            CliError::Io { .. } => "io",
            CliError::Artifact { .. } => "artifact",
        }
    }

    /// 2 for invalid input, 3 for capacity refusals, 4 for numerical
    /// non-convergence, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "validation" | "degenerate-input" => 2,
            "capacity" => 3,
            "non-convergence" => 4,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": { "kind": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() } })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
