use std::path::PathBuf;

use plasma_penalty_core::Error as CoreError;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_BLOWUP: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed table {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("run with eta = {eta:e} blew up at t = {t:e}")]
    Blowup { eta: f64, t: f64 },
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => EXIT_CONFIG,
            AppError::Io { .. } | AppError::Parse { .. } => EXIT_IO,
            AppError::Blowup { .. } => EXIT_BLOWUP,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Blowup { eta, t } => AppError::Blowup { eta, t },
            other => AppError::Config(other.to_string()),
        }
    }
}
