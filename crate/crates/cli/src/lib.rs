//! Library backing the `sedx` binary: configuration, corpus and model file
//! formats, and the command implementations.

pub mod commands;
pub mod config;
pub mod corpus;
pub mod error;
pub mod model_file;
pub mod report;

pub use error::{CliError, Result};
