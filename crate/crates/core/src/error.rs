use thiserror::Error;

use crate::nodes::NodeFamily;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("multi-index set is not downward closed")]
    NotMonotone,

    #[error("{family} rule exhausted: level {level} requested, tabulated up to {max_level}")]
    RuleExhausted {
        family: NodeFamily,
        level: usize,
        max_level: usize,
    },

    #[error("node count {n} outside supported range {min}..={max}")]
    NodeCount { n: usize, min: usize, max: usize },

    #[error("eigensolver failed to converge: {0}")]
    Convergence(String),

    #[error("got {got} values for {expected} grid points")]
    Misaligned { got: usize, expected: usize },

    #[error("parameter vector has {got} coordinates but dimension {dim} is active")]
    MissingCoordinate { dim: usize, got: usize },

    #[error("location x = {0} outside [0, 1]")]
    OutOfDomain(f64),

    #[error("parameter vector has {got} entries, {need} required")]
    ShortParameter { got: usize, need: usize },

    #[error("nonpositive diffusion coefficient {value} at x = {x}")]
    NonPositiveCoefficient { x: f64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed rule table, line {line}: {reason}")]
    Table { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
