use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A partition violated one of its structural invariants.
    #[error("invalid partition: {0}")]
    Partition(String),

    /// A label vector is inconsistent with the partition it is used with.
    #[error("invalid label: {0}")]
    Label(String),

    /// Vector or matrix dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A data file could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A record parsed but failed validation; `line` is 1-based.
    #[error("validation error at line {line}: {msg}")]
    Validation { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
