use alloc::string::String;

/// Errors raised by the library layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("group mismatch: expected {expected}, got {found}")]
    GroupMismatch { expected: String, found: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("time {0} is outside the allowed range")]
    TimeOutOfRange(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown group id `{0}`")]
    UnknownGroup(String),

    #[error("unknown distribution `{0}`")]
    UnknownDistribution(String),

    #[error("non-finite vector field output at integration step {step}")]
    NonFiniteField { step: usize },

    #[error("non-finite loss at training step {step}")]
    NonFiniteLoss { step: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
