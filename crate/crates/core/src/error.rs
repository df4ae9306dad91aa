use thiserror::Error;

/// Errors produced by the toolkit's domain operations and file parsers.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition of a domain operation was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A text input could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// One or more malformed rows in a telemetry file; row numbers are
    /// 1-based file line numbers (the header is line 1).
    #[error("malformed rows {rows:?}: {detail}")]
    MalformedRows { rows: Vec<usize>, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
