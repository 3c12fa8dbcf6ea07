use std::path::Path;

/// Failures surfaced by the front end, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad configuration, flags or input data (exit 2).
    #[error("{0}")]
    Validation(String),
    /// A numerical procedure failed on valid input (exit 3).
    #[error("{0}")]
    Computation(String),
    /// Reading or writing files failed (exit 4).
    #[error("{0}")]
    Io(String),
}

pub type AppResult<T> = Result<T, AppError>;

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) => 2,
            AppError::Computation(_) => 3,
            AppError::Io(_) => 4,
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        AppError::Io(format!("{}: {err}", path.display()))
    }
}

impl From<homsim_core::Error> for AppError {
    fn from(e: homsim_core::Error) -> Self {
        if e.is_validation() {
            AppError::Validation(e.to_string())
        } else {
            AppError::Computation(e.to_string())
        }
    }
}

impl From<homsim_core::fit::FitError> for AppError {
    fn from(e: homsim_core::fit::FitError) -> Self {
        homsim_core::Error::from(e).into()
    }
}
