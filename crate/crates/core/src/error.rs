use thiserror::Error;

/// Errors raised by the estimation, testing and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("sample is empty")]
    EmptySample,

    #[error("sample value at index {index} is not finite")]
    NonFinite { index: usize },

    #[error("aggregate weights must have a positive sum")]
    WeightSum,

    #[error("estimates evaluated at different points ({left} vs {right})")]
    QueryMismatch { left: f64, right: f64 },

    /// The reference CDF is 0 or 1 at the evaluation point, so the variance
    /// plug-in collapses.
    #[error("degenerate evaluation point: {which} = {cdf} at y = {y}")]
    DegeneratePoint { which: &'static str, cdf: f64, y: f64 },

    #[error("replication {rep_index}: no usable evaluation point after {attempts} draws")]
    RetriesExhausted { rep_index: u64, attempts: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sample variance is zero")]
    ZeroVariance,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("reference samples do not overlap: c = {c}, d = {d}")]
    NoOverlap { c: f64, d: f64 },

    #[error("fit window holds {found} usable points, need at least 2")]
    InsufficientPoints { found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
