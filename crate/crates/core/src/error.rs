//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by model construction, sampling, and analysis.
#[derive(Debug, Error)]
pub enum Error {
    /// A spin state or port vector has the wrong length.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An exact enumeration was requested beyond its feasibility bound.
    #[error("capacity exceeded: n = {n} is above the enumeration limit {limit}")]
    Capacity { n: usize, limit: usize },

    /// Degree bound too small to host a copy chain.
    #[error("invalid degree bound k = {k}: a chain node needs k >= 3")]
    InvalidBound { k: usize },

    /// Input violates a structural precondition (self-loop, bad index, ...).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Instance or experiment parameters out of range.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// Degenerate input for which the quantity is undefined.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A sweep plan is not a proper coloring of the model it is used with.
    #[error("improper coloring: {0}")]
    ImproperColoring(String),

    /// Two distributions do not live on the same support.
    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    /// Rescaled curves share no x-range, so no collapse is defined.
    #[error("no overlap between rescaled curves: {0}")]
    NoOverlap(String),

    /// No gate Hamiltonian exists within the requested weight bound.
    #[error("infeasible gate search: {0}")]
    Infeasible(String),

    /// A clamped value does not fit the target port width.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Text format could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
