use thiserror::Error;

use crate::map::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Twin/rotation tables are inconsistent; the input is not a planar map at all.
    #[error("malformed map: {0}")]
    Structural(String),

    #[error("not a bipolar-oriented planar map: {0}")]
    Invalid(ValidationReport),

    #[error("not a closed bipolar code: {0}")]
    NotClosedCode(String),

    #[error("cannot unsew step {step}: {reason}")]
    Unsew { step: usize, reason: String },

    #[error("no zero-drift distribution exists: {0}")]
    NoZeroDrift(String),

    #[error("invalid weights: {0}")]
    Weights(String),

    #[error("infeasible boundary/size combination: {0}")]
    Infeasible(String),

    #[error("resource budget exceeded: need about {required} cells, budget is {budget}")]
    Resource { required: u128, budget: u128 },

    #[error("no such maps")]
    NoSuchMaps,

    #[error("rejection sampler gave up after {tries} tries (acceptance estimate {acceptance:.3e})")]
    MaxTries { tries: u64, acceptance: f64 },

    #[error("{0}")]
    Unsupported(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("statistics: {0}")]
    Degenerate(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
