use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Core(#[from] qcompress_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
}

impl RunError {
    /// Process exit code: 2 for configuration errors, 3 for size ceilings.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::InvalidConfig(_) => 2,
            RunError::Core(qcompress_core::Error::SizeCeiling { .. }) => 3,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| RunError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, RunError>;
