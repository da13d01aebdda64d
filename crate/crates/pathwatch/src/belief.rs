//! Beta belief over the leakage rate and the Binomial detection model.
//!
//! The belief about the unknown leakage rate r is a conjugate Beta
//! distribution updated from inspection counts. Both the exact regularized
//! incomplete beta and a plain normal approximation (mean n·r, sd
//! √(n·r·(1−r)), no continuity correction) are provided for binomial tails.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special;

/// Tail evaluation mode for binomial probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    /// Log-space summation of the exact probability mass function.
    Exact,
    /// Gaussian tail with mean n·r and sd √(n·r·(1−r)).
    #[default]
    Normal,
}

impl std::fmt::Display for TailMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TailMode::Exact => write!(f, "exact"),
            TailMode::Normal => write!(f, "normal"),
        }
    }
}

/// Shape pair (α, β) of the Beta belief over the leakage rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
            return Err(Error::validation(format!(
                "beta shape parameters must be positive and finite, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Mean α / (α + β).
    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    /// Variance αβ / ((α+β)²(α+β+1)).
    pub fn variance(&self) -> f64 {
        let s = self.alpha + self.beta;
        self.alpha * self.beta / (s * s * (s + 1.0))
    }
}

/// The uninformative Jeffreys starting belief Beta(0.5, 0.5).
pub fn jeffreys_prior() -> BetaParams {
    BetaParams {
        alpha: 0.5,
        beta: 0.5,
    }
}

/// One reporting period's inspection outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InspectionBatch {
    /// Ordinal label of the reporting period.
    pub period: u64,
    pub n_inspected: u64,
    pub n_contaminated: u64,
}

impl InspectionBatch {
    pub fn new(period: u64, n_inspected: u64, n_contaminated: u64) -> Result<Self> {
        if n_contaminated > n_inspected {
            return Err(Error::validation(format!(
                "contaminated count {n_contaminated} exceeds inspected count {n_inspected}"
            )));
        }
        Ok(Self {
            period,
            n_inspected,
            n_contaminated,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.n_inspected == 0
    }
}

/// Conjugate update: Beta(α, β) + (n, y) → Beta(α + y, β + n − y).
pub fn posterior_update(prior: BetaParams, batch: &InspectionBatch) -> Result<BetaParams> {
    if batch.n_contaminated > batch.n_inspected {
        return Err(Error::validation(format!(
            "contaminated count {} exceeds inspected count {}",
            batch.n_contaminated, batch.n_inspected
        )));
    }
    let y = batch.n_contaminated as f64;
    let n = batch.n_inspected as f64;
    Ok(BetaParams {
        alpha: prior.alpha + y,
        beta: prior.beta + (n - y),
    })
}

/// The retained recent batches whose aggregate counts form the prior for
/// the next sizing calculation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceWindow {
    batches: Vec<InspectionBatch>,
    window_len: usize,
}

impl EvidenceWindow {
    /// Builds a window from already-ordered batches, keeping at most the
    /// `window_len` most recent. Periods must be strictly increasing.
    pub fn new(batches: Vec<InspectionBatch>, window_len: usize) -> Result<Self> {
        if window_len == 0 {
            return Err(Error::validation("window length must be at least 1"));
        }
        for pair in batches.windows(2) {
            if pair[1].period <= pair[0].period {
                return Err(Error::validation(format!(
                    "batch periods must be strictly increasing, got {} then {}",
                    pair[0].period, pair[1].period
                )));
            }
        }
        let mut w = Self {
            batches,
            window_len,
        };
        w.trim();
        Ok(w)
    }

    fn trim(&mut self) {
        while self.batches.len() > self.window_len {
            self.batches.remove(0);
        }
    }

    pub fn batches(&self) -> &[InspectionBatch] {
        &self.batches
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn last_period(&self) -> Option<u64> {
        self.batches.last().map(|b| b.period)
    }

    /// Elementwise sum (N, y) over the retained batches.
    pub fn aggregate(&self) -> (u64, u64) {
        let n = self.batches.iter().map(|b| b.n_inspected).sum();
        let y = self.batches.iter().map(|b| b.n_contaminated).sum();
        (n, y)
    }

    /// Belief implied by the window: Jeffreys prior updated with the
    /// aggregate counts.
    pub fn belief(&self) -> BetaParams {
        let (n, y) = self.aggregate();
        BetaParams {
            alpha: 0.5 + y as f64,
            beta: 0.5 + (n - y) as f64,
        }
    }

    /// Appends a new batch and drops the oldest beyond the window length.
    ///
    /// Empty batches (zero inspections) are accepted for bookkeeping but do
    /// not displace retained evidence. Out-of-order periods are rejected.
    pub fn roll(&self, batch: InspectionBatch) -> Result<Self> {
        if let Some(last) = self.last_period() {
            if batch.period <= last {
                return Err(Error::validation(format!(
                    "batch period {} does not succeed the latest retained period {last}",
                    batch.period
                )));
            }
        }
        let mut next = self.clone();
        if !batch.is_empty() {
            next.batches.push(batch);
            next.trim();
        }
        Ok(next)
    }
}

/// CDF of the Beta belief: ℙ(r < x) = I_x(α, β).
pub fn beta_cdf(x: f64, params: &BetaParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return Err(Error::validation(format!(
            "beta_cdf argument {x} outside [0, 1]"
        )));
    }
    Ok(special::reg_inc_beta(params.alpha, params.beta, x))
}

/// Quantile of the Beta belief, solved by bracketed bisection seeded from a
/// moment-matched Gaussian guess.
///
/// The returned point x̂ always satisfies `beta_cdf(x̂) >= q` so that a
/// threshold tuned at a credible level classifies the tuning belief at the
/// boundary rather than falling an ulp short of it.
pub fn beta_quantile(q: f64, params: &BetaParams) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::validation(format!(
            "quantile level {q} outside (0, 1)"
        )));
    }
    let cdf = |x: f64| special::reg_inc_beta(params.alpha, params.beta, x);

    // Gaussian seed, then widen until the bracket actually straddles q.
    let mean = params.mean();
    let sd = params.variance().sqrt();
    let mut lo = (mean - 10.0 * sd).max(0.0);
    let mut hi = (mean + 10.0 * sd).min(1.0);
    if cdf(lo) >= q {
        lo = 0.0;
    }
    if cdf(hi) < q {
        hi = 1.0;
    }

    // Invariant: cdf(lo) < q <= cdf(hi).
    for _ in 0..300 {
        if hi - lo <= 1.0e-15 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let c = cdf(mid);
        if c >= q {
            hi = mid;
        } else {
            lo = mid;
        }
        if c >= q && c - q < 1.0e-13 {
            break;
        }
    }
    Ok(hi)
}

/// Upper binomial tail ℙ(Y ≥ k) for Y ~ Binomial(n, r).
///
/// Exact mode accumulates the pmf in log space from the boundary term,
/// summing whichever tail has the fewer dominant terms. Degenerate rates
/// are point masses, not errors.
pub fn binomial_tail_upper(n: u64, r: f64, k: u64, mode: TailMode) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) || r.is_nan() {
        return Err(Error::validation(format!("rate {r} outside [0, 1]")));
    }
    if k > n + 1 {
        return Err(Error::validation(format!(
            "threshold {k} exceeds n + 1 = {}",
            n + 1
        )));
    }
    if k == 0 {
        return Ok(1.0);
    }
    if k > n {
        return Ok(0.0);
    }
    if r == 0.0 {
        return Ok(0.0); // k >= 1 here
    }
    if r == 1.0 {
        return Ok(1.0); // Y = n >= k
    }
    match mode {
        TailMode::Exact => Ok(binom_sf_exact(n, r, k)),
        TailMode::Normal => {
            let mean = n as f64 * r;
            let sd = (n as f64 * r * (1.0 - r)).sqrt();
            Ok(special::std_normal_sf((k as f64 - mean) / sd))
        }
    }
}

/// ln pmf(y; n, r) by the saddle-point form: Stirling errors plus the two
/// deviance terms, which stays fully accurate where direct log-gamma
/// differences would cancel away digits at large n.
fn ln_binom_pmf(n: u64, r: f64, y: u64) -> f64 {
    let nf = n as f64;
    let yf = y as f64;
    if y == 0 {
        return nf * (-r).ln_1p();
    }
    if y == n {
        return nf * r.ln();
    }
    let mf = nf - yf;
    special::stirlerr(nf)
        - special::stirlerr(yf)
        - special::stirlerr(mf)
        - special::bd0(yf, nf * r)
        - special::bd0(mf, nf * (1.0 - r))
        + 0.5 * (nf / (2.0 * std::f64::consts::PI * yf * mf)).ln()
}

fn binom_sf_exact(n: u64, r: f64, k: u64) -> f64 {
    let mean = n as f64 * r;
    let odds = r / (1.0 - r);
    if (k as f64) <= mean {
        // complement of the short lower tail, summed downward from y = k−1
        let top = k - 1;
        let ln_top = ln_binom_pmf(n, r, top);
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut y = top;
        while y > 0 {
            // pmf(y−1) = pmf(y) * y / ((n−y+1) * odds)
            term *= y as f64 / ((n - y + 1) as f64 * odds);
            sum += term;
            if term < sum * 1e-18 {
                break;
            }
            y -= 1;
        }
        (1.0 - ln_top.exp() * sum).clamp(0.0, 1.0)
    } else {
        // direct upper tail, summed upward from y = k
        let ln_bot = ln_binom_pmf(n, r, k);
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut y = k;
        while y < n {
            // pmf(y+1) = pmf(y) * (n−y)/(y+1) * odds
            term *= (n - y) as f64 / (y + 1) as f64 * odds;
            sum += term;
            if term < sum * 1e-18 {
                break;
            }
            y += 1;
        }
        (ln_bot.exp() * sum).clamp(0.0, 1.0)
    }
}
