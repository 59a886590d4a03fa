use std::io;

use thiserror::Error;

/// Errors produced by the library.
///
/// The variants line up with the process exit codes used by the CLI:
/// [`Error::Parameter`] and [`Error::Parse`] are caller mistakes (exit 1),
/// everything else is a runtime or numeric failure (exit 2).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("graph generation failed: {0}")]
    Generation(String),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("infeasible solution: {0}")]
    Infeasible(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("experiment failed: {0}")]
    Experiment(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for errors caused by bad input rather than a runtime failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parameter(_) | Error::Parse { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
