use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error("constraint `{constraint}`: {source}")]
    Parse {
        constraint: String,
        #[source]
        source: ParseError,
    },
    #[error("invalid problem: {0}")]
    Validation(String),
    #[error("non-finite value of `{constraint}` at {point:?}: {source}")]
    NonFinite {
        constraint: String,
        point: Vec<f64>,
        #[source]
        source: EvalError,
    },
    #[error("{0}")]
    Precondition(String),
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures (as opposed to bad input) at evaluation time.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFinite { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
