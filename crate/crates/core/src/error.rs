use thiserror::Error;

use crate::dyadic::DyadicInterval;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("interval {interval} is deeper than resolution level {level}")]
    TooDeep { interval: DyadicInterval, level: u32 },

    #[error("level {0} exceeds the resolution cap of {max}", max = crate::dyadic::MAX_LEVEL)]
    LevelCap(u32),

    #[error("position {position} out of range for level {level}")]
    BadPosition { level: u32, position: u64 },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("step functions at levels {0} and {1} cannot be combined without refinement")]
    LevelMismatch(u32, u32),

    #[error("exponent p = {0} is out of range")]
    BadExponent(f64),

    #[error("weight must be strictly positive and finite (found {value} at cell {cell})")]
    NonPositiveWeight { cell: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("sequence domains do not match ({0} vs {1} levels)")]
    DomainMismatch(u32, u32),

    #[error("exhaustive enumeration over {size} indices exceeds the guard of {limit}")]
    EnumerationTooLarge { size: usize, limit: usize },

    #[error("direction vector has zero norm")]
    ZeroDirection,

    #[error("coordinate descent did not converge within {sweeps} sweeps")]
    NotConverged { sweeps: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
