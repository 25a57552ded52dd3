use thiserror::Error;

/// Errors produced by graph loading, estimators and the adaptive driver.
#[derive(Debug, Error)]
pub enum Error {
    /// A line of an edge-list file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Structurally well-formed input with an invalid value (probability out
    /// of range, empty file, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// An argument violates an operation's precondition.
    #[error("invalid input: {0}")]
    Input(String),

    /// The instance is too large for an exact (exponential-time) computation.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An operation was applied to state it does not match (stale RR pool,
    /// exhausted graph, ...).
    #[error("state error: {0}")]
    State(String),

    /// An inconsistent policy or experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
