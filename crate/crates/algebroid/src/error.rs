//! Error type shared by all modules.

/// Errors raised by algebroid operations.
///
/// Domain errors (mismatched dimensions, incompatible value spaces) are
/// distinguished from the configuration-level degree cap rejection so that
/// callers can report the latter as a configuration problem rather than a
/// failed identity.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("degree cap exceeded: result has total degree {degree}, cap is {cap}")]
    DegreeCap { degree: usize, cap: u32 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("arity mismatch: form of degree {degree} applied to {args} arguments")]
    ArityMismatch { degree: usize, args: usize },

    #[error("incompatible value spaces: {0}")]
    ValueSpaceMismatch(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inconsistent gluing data on charts ({i}, {j}): defect {defect}")]
    GluingConflict { i: usize, j: usize, defect: String },
}

pub type Result<T> = std::result::Result<T, Error>;
