use thiserror::Error;

use crate::semiring::Semiring;

/// Errors raised by the toolkit. Every public fallible operation returns this type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The carrier lacks a capability the operation needs (negation on `nat`,
    /// unit decomposition on `bool`, ...).
    #[error("semiring `{semiring}` does not support {operation}")]
    Capability {
        semiring: Semiring,
        operation: &'static str,
    },

    #[error("star of {value} diverges")]
    DivergentStar { value: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not {0}")]
    Classification(&'static str),

    #[error("{0} is not a unit")]
    NotInvertible(String),

    #[error("tree error: {0}")]
    Tree(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn capability(semiring: Semiring, operation: &'static str) -> Self {
        Error::Capability {
            semiring,
            operation,
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
