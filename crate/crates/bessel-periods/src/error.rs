//! Crate-wide error type.

/// Errors produced by exact linear algebra, series manipulation, moment
/// evaluation and the verifier.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    IndexRange(String),

    #[error("divergent moment: {0}")]
    DivergentMoment(String),

    #[error("series coefficient of w^{{{num}/{ram}}} requested at or beyond truncation {trunc}/{ram}")]
    Truncated { num: i64, trunc: i64, ram: u8 },

    #[error("operators act on unramified series only")]
    RamifiedOperand,

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("cache i/o: {0}")]
    Cache(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
