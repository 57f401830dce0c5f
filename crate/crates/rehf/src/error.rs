use std::path::PathBuf;

use rehf_core::ErrorCategory;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("configuration: {0}")]
    Config(String),

    #[error("io on {path}: {source}", path = path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] rehf_core::Error),

    #[error("verification: {failed} of {total} checks failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    pub fn category(&self) -> &'static str {
        match self {
            AppError::Config(_) => "configuration",
            AppError::Io { .. } => "io",
            AppError::Core(e) => match e.category() {
                ErrorCategory::Configuration => "configuration",
                ErrorCategory::Numeric => "numeric",
            },
            AppError::VerifyFailed { .. } => "verification",
        }
    }

    /// 0 is success; 1 a failed check; 2 bad configuration; 3 a numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::VerifyFailed { .. } => 1,
            AppError::Config(_) | AppError::Io { .. } => 2,
            AppError::Core(e) => match e.category() {
                ErrorCategory::Configuration => 2,
                ErrorCategory::Numeric => 3,
            },
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
