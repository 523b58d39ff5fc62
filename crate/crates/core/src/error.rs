//! Error type shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid inputs or arguments (bad fractions, out-of-range labels, ...).
    #[error("validation: {0}")]
    Validation(String),

    /// A file could not be parsed; `line` is the 1-based physical line.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// An operation required examples with label `label` and attribute
    /// `attribute`, but the group is empty.
    #[error("empty group (label {label}, attribute {attribute}): {context}")]
    EmptyGroup {
        label: usize,
        attribute: usize,
        context: String,
    },

    /// A run configuration combines options that are not supported together.
    #[error("unsupported configuration: {0}")]
    Config(String),

    /// A NaN or infinity showed up where finite values are required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// A checkpoint file is malformed or has the wrong magic/shape header.
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl Error {
    /// Short machine-readable category, used for CLI exit codes.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Validation(_) => "validation",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::EmptyGroup { .. } => "empty-group",
            Error::Config(_) => "config",
            Error::NonFinite(_) => "non-finite",
            Error::Checkpoint(_) => "checkpoint",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
