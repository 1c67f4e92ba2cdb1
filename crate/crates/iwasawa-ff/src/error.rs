use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to act on.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("polynomial is not monic: {0}")]
    NotMonic(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("place {0} is ramified in this layer")]
    Ramified(String),
    #[error("stabilization failure at u-degree {degree}: {detail}")]
    Stabilization { degree: usize, detail: String },
    #[error("pole at u = 1 not cancelled in the {0} component")]
    Pole(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("ambiguous factor extraction: {0}")]
    Ambiguous(String),
    #[error("exceptional fibre mismatch: {0}")]
    FibreMismatch(String),
    #[error("integer overflow in {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
