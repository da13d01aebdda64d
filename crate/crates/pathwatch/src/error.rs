//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the sampling method, the comparators, and the state
/// store. CLI exit codes map onto these variants.
#[derive(Debug, Error)]
pub enum Error {
    /// Input failed a structural precondition (counts, ranges, ordering).
    #[error("invalid input: {0}")]
    Validation(String),

    /// The prior evidence does not establish a low-risk pathway, so sample
    /// sizing is not permitted. Remove the high-risk subpathway data and
    /// re-initialize.
    #[error(
        "pathway is not low risk: P(rate < {t_risk}) = {confidence:.6} < {required}; \
         remove high-risk subpathway data before sizing"
    )]
    NotLowRisk {
        t_risk: f64,
        confidence: f64,
        required: f64,
    },

    /// The pathway status is red; the sizing question is moot until the
    /// high-risk subpathway is separated out.
    #[error("pathway status is red; no sample size is recommended until the high-risk subpathway is removed")]
    RedStatus,

    /// No sample size up to the configured cap satisfies the target.
    #[error("no sample size up to {cap} meets the target {target}")]
    NoSolution { cap: u64, target: f64 },

    /// The power-analysis comparator cannot reach its power target because
    /// the estimated rate is at or above the cutoff.
    #[error("power analysis is degenerate: estimated rate {rate_estimate:.6} >= cutoff {cutoff}")]
    DegenerateRate { rate_estimate: f64, cutoff: f64 },

    #[error("state file error: {0}")]
    Io(#[from] std::io::Error),

    #[error("state file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("spec file is not valid TOML: {0}")]
    Toml(#[from] toml::de::Error),

    /// Another process holds the state-file lock.
    #[error("state file is locked by another process: {0}")]
    Locked(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
