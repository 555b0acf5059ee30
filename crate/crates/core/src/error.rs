use thiserror::Error;

use crate::exactnum::LpError;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected} points, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} exceeds the enumeration cap ({requested} > {limit})")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error(transparent)]
    Lp(#[from] LpError),

    /// A linear program returned a status that its construction rules out.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
