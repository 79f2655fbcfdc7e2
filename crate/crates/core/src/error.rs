use thiserror::Error;

/// Errors raised by the library.
///
/// Variants are split by who is at fault: [`Error::Validation`] and
/// [`Error::Argument`] mean the caller handed in something that violates a
/// contract, [`Error::Internal`] means a numerical consistency check inside the
/// library failed.
#[derive(Debug, Error)]
pub enum Error {
    /// An input value violates a type invariant (unit norm, unit trace, ...).
    #[error("validation failed: {invariant}: {detail}")]
    Validation { invariant: &'static str, detail: String },

    /// Arguments are structurally wrong (empty list, mismatched dimension, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A quantity expected to vanish by construction did not.
    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed document at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation { invariant, detail: detail.into() }
    }

    pub(crate) fn argument(detail: impl Into<String>) -> Self {
        Error::Argument(detail.into())
    }

    /// True when the caller supplied bad input, as opposed to an I/O or
    /// internal failure.
    pub fn is_user_error(&self) -> bool {
        matches!(self, Error::Validation { .. } | Error::Argument(_) | Error::Schema { .. })
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema { path: format!("line {} column {}", e.line(), e.column()), message: e.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
