//! Error taxonomy shared by every module of the crate.
//!
//! Each variant corresponds to one failure mode of the public API; callers
//! can match on the variant without parsing messages.

use thiserror::Error;

/// Errors produced by divisor-class construction, map application, family
/// pairing, counting, and (de)serialization.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A `(g, n)` pair that does not describe a modeled space, or an
    /// argument outside an operation's documented range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A boundary index `(i, S)` violating stability or mark-set validity.
    #[error("invalid boundary index: {0}")]
    InvalidBoundary(String),

    /// A mark outside `1..=n`, or a mark relabeling that is not a bijection.
    #[error("invalid mark data: {0}")]
    InvalidMark(String),

    /// Two classes (or a map and a class) that live on different spaces.
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    /// A test family whose combinatorial data is not a valid one-parameter
    /// family of stable pointed curves.
    #[error("invalid family: {0}")]
    InvalidFamily(String),

    /// Counting input whose parity admits no integer series degree.
    #[error("parity error: {0}")]
    ParityError(String),

    /// Malformed serialized input (class files, family files, expressions).
    #[error("parse error: {0}")]
    ParseError(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
