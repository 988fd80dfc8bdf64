use std::io;
use std::path::PathBuf;

use subgauss_core::Error as CoreError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config not found: {}", .0.display())]
    ConfigNotFound(PathBuf),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("numeric failure: {0}")]
    NonFinite(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn config(msg: impl Into<String>) -> Self {
        LabError::Config(msg.into())
    }

    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        LabError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::ConfigNotFound(_) | LabError::Config(_) => EXIT_INVALID,
            LabError::Core(CoreError::NumericFailure { .. }) | LabError::NonFinite(_) => EXIT_NUMERIC,
            LabError::Core(_) => EXIT_INVALID,
            LabError::Io { .. } | LabError::Csv(_) | LabError::Json(_) => EXIT_IO,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
