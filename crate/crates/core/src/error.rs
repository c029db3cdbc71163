use thiserror::Error;

/// Errors surfaced by every public operation of the crate.
#[derive(Debug, Error)]
pub enum MmotError {
    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("resource limit exceeded: {what} is {actual}, cap is {cap}")]
    Resource {
        what: &'static str,
        actual: u128,
        cap: u128,
    },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl MmotError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        MmotError::Input(msg.into())
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        MmotError::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        MmotError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, MmotError>;
