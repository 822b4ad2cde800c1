use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PavingError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("index error: index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },

    /// Enumeration would exceed the configured capacity.
    #[error("capacity error: {what} requires {count} enumerations")]
    Capacity { what: String, count: u128 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, PavingError>;
