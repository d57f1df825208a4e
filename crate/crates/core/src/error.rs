use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range for a set of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("weights required: supply explicit convex weights generating the target")]
    WeightsRequired,

    #[error("infeasible point: {0}")]
    Infeasible(String),

    #[error("enumeration exhausted without acceptance (largest multiset size tried: {largest_size})")]
    Exhausted { largest_size: usize },

    #[error("no candidate found: {0}")]
    NotFound(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
