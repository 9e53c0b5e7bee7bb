use std::path::{Path, PathBuf};

/// Failures of the std layer, grouped by the process exit code they map to.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl AppError {
    pub fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        AppError::Io {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }

    /// 1 for i/o, 2 for usage, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Io { .. } => 1,
            AppError::Usage(_) => 2,
            AppError::Numeric(_) => 3,
        }
    }
}

impl From<flrn_core::Error> for AppError {
    fn from(e: flrn_core::Error) -> Self {
        match e {
            flrn_core::Error::InvalidArgument(m) => AppError::Usage(m),
            flrn_core::Error::Numeric(m) => AppError::Numeric(m),
        }
    }
}

pub type AppResult<T> = std::result::Result<T, AppError>;
