//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by loaders, validators, and decision procedures.
#[derive(Debug, Error)]
pub enum Error {
    /// Input document could not be parsed at all.
    #[error("parse error: {0}")]
    Parse(String),
    /// Input parsed but violates a structural invariant; the message names the offending entry.
    #[error("validation error: {0}")]
    Validation(String),
    /// A point index fell outside the space.
    #[error("point index {index} out of range (space has {len} points)")]
    IndexOutOfRange { index: usize, len: usize },
    /// Chain concatenation requires matching endpoints.
    #[error("endpoint mismatch: first chain ends at {left}, second starts at {right}")]
    EndpointMismatch { left: usize, right: usize },
    /// Chains being combined must live at the same scale.
    #[error("scale mismatch: {0} vs {1}")]
    ScaleMismatch(f64, f64),
    /// A homotopy move would break the chain condition; carries the violating pair.
    #[error("move rejected: pair ({0}, {1}) has distance {2} exceeding scale {3}")]
    MoveBreaksChain(usize, usize, f64, f64),
    /// A homotopy move touched an endpoint or an invalid position.
    #[error("move rejected: {0}")]
    InvalidMove(String),
    /// Chain-class operations require a chain based at the basepoint.
    #[error("chain not based at basepoint (starts at {0}, basepoint is {1})")]
    NotBased(usize, usize),
    /// Resource caps must be positive.
    #[error("cap must be at least 1")]
    CapTooSmall,
    /// Normal cores exist only for completed enumerations.
    #[error("core requires finite index (enumeration exhausted at cap {0})")]
    CoreRequiresFiniteIndex(usize),
    /// A word referenced a generator the presentation does not have.
    #[error("word uses generator {0} but presentation has {1} generators")]
    GeneratorOutOfRange(usize, usize),
    /// Degenerate recipe parameters.
    #[error("invalid recipe: {0}")]
    Recipe(String),
    /// A short map failed its scale-preservation check.
    #[error("map is not scale-preserving at {scale}: pair ({i}, {j}) maps to distance {got}")]
    NotScalePreserving {
        scale: f64,
        i: usize,
        j: usize,
        got: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
