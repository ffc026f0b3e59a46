use thiserror::Error;

/// Errors reported by the library. Invariant violations that indicate a bug
/// are reported as [`Error::Internal`] rather than panics.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("not a lattice point: {0}")]
    NotALatticePoint(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("division by Pi of a unit")]
    PiDivision,
    #[error("sampling failed: {0}")]
    SamplingFailure(String),
    #[error("internal consistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
