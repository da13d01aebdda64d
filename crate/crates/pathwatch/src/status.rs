//! Thresholds and traffic-light classification of the leakage-rate belief.

use serde::{Deserialize, Serialize};

use crate::belief::{beta_cdf, beta_quantile, BetaParams};
use crate::error::{Error, Result};

/// The two-threshold configuration driving classification and sizing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Low-risk ceiling: rates above this are unacceptable.
    pub t_risk: f64,
    /// Change-detection level, tuned below `t_risk`.
    pub t_change: f64,
    /// One-sided credible level used for tuning and classification.
    pub credible_level: f64,
}

impl Thresholds {
    pub fn new(t_risk: f64, t_change: f64, credible_level: f64) -> Result<Self> {
        if !(0.0 < t_change && t_change < t_risk && t_risk < 1.0) {
            return Err(Error::validation(format!(
                "thresholds must satisfy 0 < t_change < t_risk < 1, got t_change={t_change}, t_risk={t_risk}"
            )));
        }
        if !(0.5 < credible_level && credible_level < 1.0) {
            return Err(Error::validation(format!(
                "credible level must lie in (0.5, 1), got {credible_level}"
            )));
        }
        Ok(Self {
            t_risk,
            t_change,
            credible_level,
        })
    }

    /// Tunes `t_change` from the prior belief at the credible level.
    pub fn tuned(prior: &BetaParams, t_risk: f64, credible_level: f64) -> Result<Self> {
        let t_change = tune_change_threshold(prior, credible_level)?;
        Self::new(t_risk, t_change, credible_level)
    }
}

/// Traffic-light pathway status, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColourStatus {
    Green,
    Orange,
    Red,
}

impl std::fmt::Display for ColourStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColourStatus::Green => write!(f, "green"),
            ColourStatus::Orange => write!(f, "orange"),
            ColourStatus::Red => write!(f, "red"),
        }
    }
}

/// Sets the change-detection threshold at the one-sided credible quantile
/// of the prior belief, so the prior itself classifies exactly at the green
/// boundary.
pub fn tune_change_threshold(prior: &BetaParams, credible_level: f64) -> Result<f64> {
    beta_quantile(credible_level, prior)
}

/// Classifies the belief: green when confidently below `t_change`, orange
/// when confidently below `t_risk` only, red otherwise. Boundary ties take
/// the less severe colour.
pub fn classify(belief: &BetaParams, thresholds: &Thresholds) -> ColourStatus {
    let level = thresholds.credible_level;
    let p_change = beta_cdf(thresholds.t_change, belief).expect("t_change validated in [0,1]");
    if p_change >= level {
        return ColourStatus::Green;
    }
    let p_risk = beta_cdf(thresholds.t_risk, belief).expect("t_risk validated in [0,1]");
    if p_risk >= level {
        ColourStatus::Orange
    } else {
        ColourStatus::Red
    }
}

/// True when the belief puts at least `credible_level` mass below `t_risk`;
/// sample sizing is only permitted when this holds.
pub fn assert_low_risk(prior: &BetaParams, t_risk: f64, credible_level: f64) -> bool {
    match beta_cdf(t_risk, prior) {
        Ok(p) => p >= credible_level,
        Err(_) => false,
    }
}

/// Same check, but returns the structured error used by the sizing entry
/// points when the requirement fails.
pub fn require_low_risk(prior: &BetaParams, t_risk: f64, credible_level: f64) -> Result<()> {
    let p = beta_cdf(t_risk, prior)?;
    if p >= credible_level {
        Ok(())
    } else {
        Err(Error::NotLowRisk {
            t_risk,
            confidence: p,
            required: credible_level,
        })
    }
}
