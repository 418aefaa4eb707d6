use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("elements live in different fields: Q(sqrt {0}) vs Q(sqrt {1})")]
    MixedField(i64, i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("d = {0} is not a squarefree integer > 1")]
    NotSquarefree(i64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("search bound {0} exceeded")]
    SearchBound(u64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for failures caused by the caller's data rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Numeric(_) | Error::SearchBound(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
