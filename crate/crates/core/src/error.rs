use thiserror::Error;

/// Errors raised by code construction, encoding, recovery and certification.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("decode failure: {0}")]
    DecodeFailure(String),
    #[error("parameter constraint violated: {0}")]
    Parameter(String),
    #[error("coordinate {0} is outside the readable set")]
    MissingCoordinate(usize),
    #[error("slope search exhausted after {achieved} of {requested} slopes")]
    SlopeSearchExhausted { achieved: usize, requested: usize },
    #[error("certification failure: {0}")]
    Certification(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
