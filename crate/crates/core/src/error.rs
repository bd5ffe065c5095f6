use thiserror::Error;

use crate::complex::ValidationReport;

/// Coarse classification used by front ends to choose exit codes and HTTP statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Unsupported,
    Numerical,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid filtration: {0}")]
    InvalidFiltration(ValidationReport),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate point configuration {points:?}: {reason}")]
    Degenerate { points: Vec<usize>, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("condition violated: {0}")]
    ConditionViolation(String),

    #[error("linear program {status}: {context}")]
    Numerical { status: String, context: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. }
            | Error::InvalidFiltration(_)
            | Error::InvalidInput(_)
            | Error::Degenerate { .. }
            | Error::Io(_) => ErrorKind::Input,
            Error::Unsupported(_) | Error::ConditionViolation(_) => ErrorKind::Unsupported,
            Error::Numerical { .. } => ErrorKind::Numerical,
            Error::Internal(_) => ErrorKind::Internal,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
