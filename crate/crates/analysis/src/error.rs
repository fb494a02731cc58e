use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::fit::FitError;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] magic_core::Error),

    #[error("fit failed: {0}")]
    Fit(#[from] FitError),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Usage(String),
}

impl AppError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn csv(path: &Path, source: csv::Error) -> Self {
        AppError::Csv {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        let validation = match self {
            AppError::Core(e) => e.is_validation(),
            AppError::Fit(e) => e.is_validation(),
            AppError::Io { .. } | AppError::Csv { .. } | AppError::Json(_) | AppError::Usage(_) => true,
        };
        if validation {
            1
        } else {
            2
        }
    }
}
