//! Command-line error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] sedx_core::Error),

    #[error("i/o error on '{path}': {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("parse error at row {row} of '{path}': {message}")]
    Parse {
        path: String,
        /// 1-based row number, counting the header.
        row: usize,
        message: String,
    },

    #[error("config error in '{path}': {message}")]
    Config { path: String, message: String },

    #[error("model file '{path}': {message}")]
    ModelFile { path: String, message: String },

    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
