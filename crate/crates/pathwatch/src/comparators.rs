//! Baseline sizing policies the adaptive method is compared against: the
//! fixed detection-level design and a classical binomial power analysis.
//!
//! The power analysis is a documented surrogate for risk-cutoff sizing
//! methods: test H₀: rate ≥ cutoff at size alpha (reject on low counts)
//! and require the stated power at the point estimate of the current rate.
//! It reproduces the qualitative behaviours expected of such methods —
//! it asks for the most sampling of the three, roughly doubles the fixed
//! volume on very clean pathways, and blows up as the estimated rate
//! approaches the cutoff.

use serde::{Deserialize, Serialize};

use crate::belief::{binomial_tail_upper, EvidenceWindow, TailMode};
use crate::error::{Error, Result};
use crate::search;

/// Rounding convention for the fixed design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FixedRounding {
    /// The exact smallest count meeting the confidence requirement.
    #[default]
    Exact,
    /// The operational convention of rounding up to 600.
    RoundTo600,
}

/// Fixed detection-level design: enough samples to detect contamination at
/// `detection_level` with probability `confidence`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedDesign {
    pub detection_level: f64,
    pub confidence: f64,
    pub rounding: FixedRounding,
}

impl Default for FixedDesign {
    fn default() -> Self {
        Self {
            detection_level: 0.005,
            confidence: 0.95,
            rounding: FixedRounding::Exact,
        }
    }
}

impl FixedDesign {
    pub fn validate(&self) -> Result<()> {
        if !(self.detection_level > 0.0 && self.detection_level < 1.0) {
            return Err(Error::validation(format!(
                "detection level must lie in (0, 1), got {}",
                self.detection_level
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::validation(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

/// Smallest n with 1 − (1 − detection_level)^n ≥ confidence.
pub fn fixed_detection_size(design: &FixedDesign) -> Result<u64> {
    design.validate()?;
    if design.rounding == FixedRounding::RoundTo600 {
        return Ok(600);
    }
    let p = design.detection_level;
    let guess = ((1.0 - design.confidence).ln() / (-p).ln_1p())
        .ceil()
        .max(1.0) as u64;
    // settle floating error at the boundary by direct checks
    let detects = |n: u64| -((n as f64) * (-p).ln_1p()).exp_m1();
    let mut n = guess;
    while detects(n) < design.confidence {
        n += 1;
    }
    while n > 1 && detects(n - 1) >= design.confidence {
        n -= 1;
    }
    Ok(n)
}

/// Power-analysis surrogate design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerDesign {
    /// Risk cutoff taken as the null-hypothesis rate.
    pub cutoff: f64,
    /// Test size.
    pub alpha: f64,
    /// Required power at the estimated rate.
    pub power: f64,
    /// Search cap; exceeding it yields `NoSolution`.
    pub n_cap: u64,
}

impl PowerDesign {
    pub fn new(cutoff: f64) -> Self {
        Self {
            cutoff,
            alpha: 0.05,
            power: 0.95,
            n_cap: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("cutoff", self.cutoff),
            ("alpha", self.alpha),
            ("power", self.power),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::validation(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Smallest n for which the level-alpha test of H₀: rate ≥ cutoff (reject
/// when the count is at or below the critical value) reaches the design
/// power at the posterior-mean estimate of the pathway rate.
pub fn power_analysis_size(
    window: &EvidenceWindow,
    design: &PowerDesign,
    mode: TailMode,
) -> Result<u64> {
    design.validate()?;
    let (n0, y0) = window.aggregate();
    if n0 == 0 {
        return Err(Error::validation(
            "power analysis requires non-empty prior data",
        ));
    }
    let rate_estimate = (y0 as f64 + 0.5) / (n0 as f64 + 1.0);
    if rate_estimate >= design.cutoff {
        return Err(Error::DegenerateRate {
            rate_estimate,
            cutoff: design.cutoff,
        });
    }

    let power_at = |n: u64| -> f64 {
        match rejection_cutoff(n, design.cutoff, design.alpha, mode) {
            Some(c) => binom_cdf(c, n, rate_estimate, mode),
            None => 0.0,
        }
    };
    search::smallest_satisfying(|n| power_at(n) >= design.power, design.n_cap, 50).ok_or(
        Error::NoSolution {
            cap: design.n_cap,
            target: design.power,
        },
    )
}

/// Largest count c with ℙ(Y ≤ c | n, cutoff) ≤ alpha, or None when even a
/// zero count is not surprising under the null.
fn rejection_cutoff(n: u64, cutoff: f64, alpha: f64, mode: TailMode) -> Option<u64> {
    if binom_cdf(0, n, cutoff, mode) > alpha {
        return None;
    }
    let mut lo = 0u64; // cdf <= alpha
    let mut hi = n; // cdf(n) = 1 > alpha
    if binom_cdf(hi, n, cutoff, mode) <= alpha {
        return Some(hi);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if binom_cdf(mid, n, cutoff, mode) <= alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn binom_cdf(c: u64, n: u64, r: f64, mode: TailMode) -> f64 {
    1.0 - binomial_tail_upper(n, r, c + 1, mode).expect("validated arguments")
}
