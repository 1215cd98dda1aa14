use thiserror::Error;

/// Errors raised by the coding, decoding, bound and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid code parameters RM({m},{r}): {reason}")]
    InvalidParams { m: u32, r: u32, reason: &'static str },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("word length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("malformed word string: {0}")]
    MalformedWord(String),

    #[error("invalid subspace dimension k={k} for ambient dimension m={m}")]
    InvalidSubspaceDim { m: u32, k: u32 },

    #[error("invalid decoder configuration: {0}")]
    InvalidConfig(String),

    #[error("code dimension {dimension} exceeds the exhaustive search budget of {limit}")]
    DimensionTooLarge { dimension: usize, limit: usize },

    #[error("parameter {name}={value} outside its domain {domain}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("epsilon={epsilon} outside the validity window: must satisfy 0 < epsilon < {edge}")]
    OutsideValidityWindow { epsilon: f64, edge: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
