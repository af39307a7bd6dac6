use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid solution: {0}")]
    Encoding(String),

    #[error("index {index} out of range for space of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("operation requires a {expected} space, got {actual}")]
    WrongSpaceKind {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("space of size {size} exceeds the ceiling of {ceiling} for {what}")]
    TooLarge {
        what: &'static str,
        size: u128,
        ceiling: u128,
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("exponential action did not converge: degree {required} exceeds ceiling {ceiling}")]
    NonConvergence { required: usize, ceiling: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty distance subset at h={0}")]
    EmptySubset(usize),

    #[error("optimum value is zero, ratio axis undefined")]
    ZeroOptimum,

    #[error("malformed instance document: {0}")]
    Document(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
