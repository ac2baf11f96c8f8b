use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Two points that must be distinct coincide (or a distance is not positive).
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// An argument violates an operation precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Scenario file failed validation; `field` names the offending key.
    #[error("invalid scenario field `{field}`: {reason}")]
    InvalidField { field: String, reason: String },

    #[error("missing scenario field `{0}`")]
    MissingField(String),

    /// Mutually exclusive keys were both given.
    #[error("scenario fields `{0}` and `{1}` are mutually exclusive")]
    ExclusiveFields(String, String),

    #[error("failed to parse scenario {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A trajectory solve did not reach tolerance.
    #[error("solver did not converge: {0}")]
    Solver(String),

    /// Malformed delimited-text data on read-back.
    #[error("malformed record in {path} at line {line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateGeometry(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidField {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short category used for process exit codes.
    pub fn category(&self) -> &'static str {
        match self {
            Error::DegenerateGeometry(_) => "geometry",
            Error::InvalidInput(_) => "input",
            Error::InvalidField { .. }
            | Error::MissingField(_)
            | Error::ExclusiveFields(..)
            | Error::Parse { .. } => "validation",
            Error::Io { .. } | Error::Format { .. } => "io",
            Error::Solver(_) => "solver",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
