use thiserror::Error;

use crate::ring::RingSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: RingSpec, right: RingSpec },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("not a complex: d^{} d^{degree} != 0", degree + 1)]
    NotAComplex { degree: i64 },

    #[error("not a chain map: squares fail to commute in degree {degree}")]
    NotAChainMap { degree: i64 },

    #[error("short exact sequence fails in degree {degree}: {reason}")]
    NotExact { degree: i64, reason: String },

    #[error("degree {degree} outside window {lo}..{hi}")]
    DegreeOutOfWindow { degree: i64, lo: i64, hi: i64 },

    #[error("not an automorphism: det in degree {degree} is {det}, not a unit")]
    NotAutomorphism { degree: i64, det: String },

    #[error("ring {0} is reduced: it has no nonzero square-zero element")]
    NoNilpotent(RingSpec),

    #[error("enumeration size {size} exceeds ceiling {ceiling}")]
    CeilingExceeded { size: u128, ceiling: u128 },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
