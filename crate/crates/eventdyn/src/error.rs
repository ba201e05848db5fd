//! Crate-wide error type, split into the failure classes the command-line
//! front end maps to exit codes.

use std::io;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// What went wrong: the world (I/O), the input (validation), or the data
/// being too small or too flat to analyze (degeneracy).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    /// Process exit code contract: 1 = I/O, 2 = validation, 3 = degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::Invalid(_) => 2,
            Error::Degenerate(_) => 3,
        }
    }

    /// Prepends context to the message, keeping the failure class.
    pub fn prefixed(self, context: &str) -> Self {
        match self {
            Error::Io(e) => Error::Io(e),
            Error::Invalid(msg) => Error::Invalid(format!("{context}: {msg}")),
            Error::Degenerate(msg) => Error::Degenerate(format!("{context}: {msg}")),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                _ => unreachable!("is_io_error guarantees an Io kind"),
            }
        } else {
            Error::Invalid(e.to_string())
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.classify() == serde_json::error::Category::Io {
            Error::Io(e.into())
        } else {
            Error::Invalid(e.to_string())
        }
    }
}
