use thiserror::Error;

use crate::lattice::LatticePoint;

/// Errors raised anywhere in the construction or its verification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameters are infeasible; failing conditions: {0:?}")]
    Infeasible(Vec<&'static str>),

    #[error("index {index} lies outside the truncation box of radius {radius}")]
    OutOfBox { index: LatticePoint, radius: i64 },

    #[error("word left the safe domain after prefix `{prefix}` (next index {index})")]
    Unsafe { prefix: String, index: LatticePoint },

    #[error("point {x} lies outside [{left}, {right}]")]
    OutsideInterval { x: f64, left: f64, right: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("orbit horizon exhausted: {0}")]
    HorizonExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;
