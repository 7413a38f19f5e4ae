use thiserror::Error;

/// Errors raised by the geometry primitives and volume engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The input does not describe a valid instance (bad radius, empty vector, ...).
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// The instance is well formed but violates an engine's hypothesis,
    /// e.g. `|c|_1 > r` for the two-ball engine.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Several vertex subsets span the same facet hyperplane.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("origin is not interior to the polytope")]
    OriginNotInterior,

    /// A state that interior-origin geometry rules out was reached anyway.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    /// The request is outside what the engine supports (dimension, grid size, ...).
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
