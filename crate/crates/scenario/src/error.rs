use std::path::PathBuf;

use thiserror::Error;

/// Failure of a scenario; [`ScenarioError::exit_code`] maps it onto the CLI
/// status codes.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("could not parse {what}: {reason}")]
    Parse { what: String, reason: String },
    #[error(transparent)]
    Core(#[from] zeno_core::Error),
    #[error("run `{label}` did not converge: observables moved by {delta:e} (tolerance {tolerance:e}) under a cutoff increment")]
    Convergence { label: String, delta: f64, tolerance: f64 },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ScenarioError {
    pub fn validation(msg: impl Into<String>) -> Self {
        ScenarioError::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ScenarioError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for bad input, 3 for numerical failure, 1 for I/O trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Validation(_) | ScenarioError::UnknownPreset(_) | ScenarioError::Parse { .. } => 2,
            ScenarioError::Core(e) => match e {
                zeno_core::Error::IntegratorUnstable { .. } => 3,
                _ => 2,
            },
            ScenarioError::Convergence { .. } => 3,
            ScenarioError::Io { .. } => 1,
        }
    }
}

pub type Result<T, E = ScenarioError> = std::result::Result<T, E>;
