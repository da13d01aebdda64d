//! Minimum next-period sample size: the smallest N₁ whose weighted
//! probability of escalating out of green, given the true rate sits above
//! the risk ceiling, reaches the target.
//!
//! The success probability for a hypothetical rate r′ > T_risk is the
//! binomial tail mass at or above the escalation boundary — the
//! contamination count at which the updated belief stops being green. In
//! exact mode that boundary is the integer y_crit and the tail is summed
//! exactly; in normal mode the boundary is kept continuous and the tail is
//! the Gaussian mass above it, which is what makes the recommendation vary
//! smoothly with N₁. Averaging over r′ uses the prior truncated to
//! (T_risk, 1], evaluated in the t = −log r′ variable throughout.

use serde::{Deserialize, Serialize};

use crate::belief::{binomial_tail_upper, BetaParams, EvidenceWindow, TailMode};
use crate::error::{Error, Result};
use crate::quad;
use crate::search;
use crate::special;
use crate::status::{require_low_risk, Thresholds};

/// A hypothetical post-change rate, constrained above the risk ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypotheticalRate(f64);

impl HypotheticalRate {
    pub fn new(r_prime: f64, t_risk: f64) -> Result<Self> {
        if !(r_prime > t_risk && r_prime <= 1.0) {
            return Err(Error::validation(format!(
                "hypothetical rate must lie in (t_risk, 1], got {r_prime} with t_risk {t_risk}"
            )));
        }
        Ok(Self(r_prime))
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

/// Options for the sizing solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizingOptions {
    /// Required weighted escalation probability.
    pub target: f64,
    pub mode: TailMode,
    /// Search cap; exceeding it yields `NoSolution`.
    pub n_cap: u64,
}

impl Default for SizingOptions {
    fn default() -> Self {
        Self {
            target: 0.95,
            mode: TailMode::Normal,
            n_cap: 1_000_000,
        }
    }
}

/// Outcome of the sizing solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizingResult {
    /// Recommended minimum samples for the next reporting period.
    pub n_min: u64,
    /// Smallest contamination count that escalates out of green at `n_min`.
    pub y_crit: u64,
    /// Weighted escalation probability achieved at `n_min`.
    pub achieved_success: f64,
    pub mode: TailMode,
}

/// Smallest integer contamination count y₁ for which the posterior after
/// (n1, y₁) is no longer green; returns n1 + 1 when no count escalates.
pub fn critical_contamination_count(
    n1: u64,
    prior: &BetaParams,
    t_change: f64,
    credible_level: f64,
) -> u64 {
    let escalates = |y: u64| posterior_green_prob(prior, n1, y as f64, t_change) < credible_level;
    if escalates(0) {
        return 0;
    }
    if !escalates(n1) {
        return n1 + 1;
    }
    // monotone in y by posterior stochastic ordering
    let mut lo = 0u64; // stays green
    let mut hi = n1; // escalates
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if escalates(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Real-valued escalation boundary: the y at which
/// ℙ(r < t_change | prior ⊕ (n1, y)) crosses the credible level, treating
/// the contamination count as continuous. Returns 0 when even a clean
/// period escalates and n1 + 1 when no count does.
pub fn escalation_boundary(n1: u64, prior: &BetaParams, t_change: f64, credible_level: f64) -> f64 {
    let green = |y: f64| posterior_green_prob(prior, n1, y, t_change) >= credible_level;
    if !green(0.0) {
        return 0.0;
    }
    let nf = n1 as f64;
    if green(nf) {
        return nf + 1.0;
    }
    let mut lo = 0.0; // green
    let mut hi = nf; // escalated
    for _ in 0..200 {
        if hi - lo < 1e-9 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if green(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn posterior_green_prob(prior: &BetaParams, n1: u64, y: f64, t_change: f64) -> f64 {
    let post = BetaParams {
        alpha: prior.alpha + y,
        beta: prior.beta + (n1 as f64 - y),
    };
    special::reg_inc_beta(post.alpha, post.beta, t_change)
}

/// Probability that sampling n1 items at true rate r′ escalates the
/// pathway out of green.
pub fn success_prob_at_rate(
    n1: u64,
    r_prime: HypotheticalRate,
    prior: &BetaParams,
    thresholds: &Thresholds,
    mode: TailMode,
) -> Result<f64> {
    let r = r_prime.get();
    match mode {
        TailMode::Exact => {
            let y_crit = critical_contamination_count(
                n1,
                prior,
                thresholds.t_change,
                thresholds.credible_level,
            );
            if y_crit > n1 {
                return Ok(0.0);
            }
            binomial_tail_upper(n1, r, y_crit, TailMode::Exact)
        }
        TailMode::Normal => {
            let boundary =
                escalation_boundary(n1, prior, thresholds.t_change, thresholds.credible_level);
            Ok(normal_escalation_tail(n1, r, boundary))
        }
    }
}

/// Gaussian mass above the (possibly fractional) escalation boundary.
fn normal_escalation_tail(n1: u64, r: f64, boundary: f64) -> f64 {
    if boundary <= 0.0 {
        return 1.0;
    }
    if boundary > n1 as f64 {
        return 0.0;
    }
    let mean = n1 as f64 * r;
    let var = n1 as f64 * r * (1.0 - r);
    if var == 0.0 {
        return if mean >= boundary { 1.0 } else { 0.0 };
    }
    special::std_normal_sf((boundary - mean) / var.sqrt())
}

/// x·ln(y) with the 0·ln(0) corner defined as 0, for unit shape exponents.
fn xlny(x: f64, ln_y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * ln_y
    }
}

/// Log-density of the prior truncated to rates above the risk ceiling:
/// (α−1)·log r + (β−1)·log(1−r) − log M, with the normalizing mass M
/// integrated in the t = −log r variable.
pub fn truncated_prior_log_density(r: f64, prior: &BetaParams, t_risk: f64) -> Result<f64> {
    if !(r > t_risk && r <= 1.0) {
        return Err(Error::validation(format!(
            "truncated prior is supported on ({t_risk}, 1], got {r}"
        )));
    }
    let ln_mass = ln_truncated_mass(prior, t_risk);
    Ok(xlny(prior.alpha - 1.0, r.ln()) + xlny(prior.beta - 1.0, (-r).ln_1p()) - ln_mass)
}

/// log ∫_0^{−log t_risk} e^{−α t} (1 − e^{−t})^{β−1} dt, evaluated with the
/// peak shifted out so β ~ 10⁴ cannot underflow the integrand.
fn ln_truncated_mass(prior: &BetaParams, t_risk: f64) -> f64 {
    let t_max = -t_risk.ln();
    let g = |t: f64| -prior.alpha * t + xlny(prior.beta - 1.0, (-(-t).exp_m1()).ln());
    // reference point: coarse grid max, endpoints excluded on the left
    let mut g_ref = g(t_max);
    for i in 1..512 {
        let t = t_max * (i as f64 / 512.0);
        g_ref = g_ref.max(g(t));
    }
    let shifted = quad::integrate(
        |t| (g(t) - g_ref).exp(),
        0.0,
        t_max,
        1e-12,
        &peak_breaks(t_max),
    );
    g_ref + shifted.ln()
}

/// Geometric break points crowding the right endpoint, where the truncated
/// prior's mass concentrates: the weight decays away from t_max at rate
/// roughly β·t_risk, so the sharp feature can be an order 1/β sliver.
fn peak_breaks(t_max: f64) -> Vec<f64> {
    (1..=24).map(|k| t_max - t_max * 0.5f64.powi(k)).collect()
}

/// Escalation probability averaged over hypothetical rates above the risk
/// ceiling, weighted by the truncated prior.
pub fn weighted_success_prob(
    n1: u64,
    prior: &BetaParams,
    thresholds: &Thresholds,
    mode: TailMode,
) -> Result<f64> {
    require_low_risk(prior, thresholds.t_risk, thresholds.credible_level)?;
    let ctx = SizingContext::new(prior, thresholds);
    Ok(ctx.weighted_success(n1, mode))
}

/// Per-solve context so the truncated-prior mass is computed once.
struct SizingContext<'a> {
    prior: &'a BetaParams,
    thresholds: &'a Thresholds,
    ln_mass: f64,
    t_max: f64,
}

impl<'a> SizingContext<'a> {
    fn new(prior: &'a BetaParams, thresholds: &'a Thresholds) -> Self {
        Self {
            prior,
            thresholds,
            ln_mass: ln_truncated_mass(prior, thresholds.t_risk),
            t_max: -thresholds.t_risk.ln(),
        }
    }

    fn ln_weight(&self, t: f64) -> f64 {
        -self.prior.alpha * t + xlny(self.prior.beta - 1.0, (-(-t).exp_m1()).ln()) - self.ln_mass
    }

    fn weighted_success(&self, n1: u64, mode: TailMode) -> f64 {
        if n1 == 0 {
            // nothing can escalate a green prior without samples
            let boundary = escalation_boundary(
                0,
                self.prior,
                self.thresholds.t_change,
                self.thresholds.credible_level,
            );
            return if boundary <= 0.0 { 1.0 } else { 0.0 };
        }
        let success: Box<dyn Fn(f64) -> f64> = match mode {
            TailMode::Exact => {
                let y_crit = critical_contamination_count(
                    n1,
                    self.prior,
                    self.thresholds.t_change,
                    self.thresholds.credible_level,
                );
                if y_crit > n1 {
                    return 0.0;
                }
                Box::new(move |r: f64| {
                    binomial_tail_upper(n1, r, y_crit, TailMode::Exact).expect("validated args")
                })
            }
            TailMode::Normal => {
                let boundary = escalation_boundary(
                    n1,
                    self.prior,
                    self.thresholds.t_change,
                    self.thresholds.credible_level,
                );
                Box::new(move |r: f64| normal_escalation_tail(n1, r, boundary))
            }
        };
        let integrand = |t: f64| {
            let r = (-t).exp();
            self.ln_weight(t).exp() * success(r)
        };
        quad::integrate(integrand, 0.0, self.t_max, 1e-9, &peak_breaks(self.t_max)).clamp(0.0, 1.0)
    }
}

/// Smallest N₁ whose weighted escalation probability reaches the target.
///
/// Errors with `NotLowRisk` when the window's belief violates the low-risk
/// requirement and `NoSolution` when the cap is exhausted.
pub fn min_sample_size(
    window: &EvidenceWindow,
    thresholds: &Thresholds,
    opts: &SizingOptions,
) -> Result<SizingResult> {
    let prior = window.belief();
    min_sample_size_from_prior(&prior, thresholds, opts)
}

/// Same solver, taking the aggregated belief directly.
pub fn min_sample_size_from_prior(
    prior: &BetaParams,
    thresholds: &Thresholds,
    opts: &SizingOptions,
) -> Result<SizingResult> {
    if !(opts.target > 0.0 && opts.target < 1.0) {
        return Err(Error::validation(format!(
            "target must lie in (0, 1), got {}",
            opts.target
        )));
    }
    require_low_risk(prior, thresholds.t_risk, thresholds.credible_level)?;
    let ctx = SizingContext::new(prior, thresholds);

    let n_min = search::smallest_satisfying(
        |n| ctx.weighted_success(n, opts.mode) >= opts.target,
        opts.n_cap,
        50,
    )
    .ok_or(Error::NoSolution {
        cap: opts.n_cap,
        target: opts.target,
    })?;

    Ok(SizingResult {
        n_min,
        y_crit: critical_contamination_count(
            n_min,
            prior,
            thresholds.t_change,
            thresholds.credible_level,
        ),
        achieved_success: ctx.weighted_success(n_min, opts.mode),
        mode: opts.mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::InspectionBatch;
    use approx::assert_abs_diff_eq;

    fn table_prior() -> BetaParams {
        BetaParams::new(6.5, 9994.5).unwrap()
    }

    fn table_thresholds() -> Thresholds {
        Thresholds::tuned(&table_prior(), 0.005, 0.95).unwrap()
    }

    fn table_window() -> EvidenceWindow {
        EvidenceWindow::new(
            vec![
                InspectionBatch::new(1, 5000, 3).unwrap(),
                InspectionBatch::new(2, 5000, 3).unwrap(),
            ],
            2,
        )
        .unwrap()
    }

    #[test]
    fn y_crit_at_headline_volume() {
        let th = table_thresholds();
        // brute-force oracle: scan every count
        let oracle = (0..=756)
            .find(|&y| posterior_green_prob(&table_prior(), 756, y as f64, th.t_change) < 0.95)
            .unwrap();
        assert_eq!(oracle, 1);
        assert_eq!(
            critical_contamination_count(756, &table_prior(), th.t_change, 0.95),
            1
        );
    }

    #[test]
    fn y_crit_binary_search_matches_scan_across_volumes() {
        let th = table_thresholds();
        for n1 in [10u64, 100, 600, 756, 1177, 1178, 2500] {
            let scan = (0..=n1)
                .find(|&y| posterior_green_prob(&table_prior(), n1, y as f64, th.t_change) < 0.95)
                .unwrap_or(n1 + 1);
            let fast = critical_contamination_count(n1, &table_prior(), th.t_change, 0.95);
            assert_eq!(scan, fast, "mismatch at n1={n1}");
        }
    }

    #[test]
    fn y_crit_steps_up_with_volume() {
        // frozen boundary: one detection stops escalating at n1 = 1178
        let th = table_thresholds();
        assert_eq!(
            critical_contamination_count(1177, &table_prior(), th.t_change, 0.95),
            1
        );
        assert_eq!(
            critical_contamination_count(1178, &table_prior(), th.t_change, 0.95),
            2
        );
    }

    #[test]
    fn full_contamination_always_escalates() {
        let th = table_thresholds();
        for n1 in [1u64, 5, 50, 756] {
            assert!(posterior_green_prob(&table_prior(), n1, n1 as f64, th.t_change) < 0.95);
        }
    }

    #[test]
    fn escalation_boundary_frozen_values() {
        let th = table_thresholds();
        let b756 = escalation_boundary(756, &table_prior(), th.t_change, 0.95);
        assert_abs_diff_eq!(b756, 0.6397528642882419, epsilon = 1e-6);
        let b600 = escalation_boundary(600, &table_prior(), th.t_change, 0.95);
        assert_abs_diff_eq!(b600, 0.5071264363143905, epsilon = 1e-6);
        // consistency with the integer boundary
        assert_eq!(b756.ceil() as u64, 1);
    }

    #[test]
    fn success_certain_when_zero_detections_escalate() {
        // a prior that is low-risk but already orange against a generic
        // t_change: every count including zero escalates
        let prior = BetaParams::new(3.5, 1665.5).unwrap();
        let th = Thresholds::new(0.02, 1e-4, 0.95).unwrap();
        assert_eq!(
            critical_contamination_count(40, &prior, th.t_change, 0.95),
            0
        );
        let s = success_prob_at_rate(
            40,
            HypotheticalRate::new(0.03, 0.02).unwrap(),
            &prior,
            &th,
            TailMode::Exact,
        )
        .unwrap();
        assert_eq!(s, 1.0);
        let s = success_prob_at_rate(
            40,
            HypotheticalRate::new(0.03, 0.02).unwrap(),
            &prior,
            &th,
            TailMode::Normal,
        )
        .unwrap();
        assert_eq!(s, 1.0);
    }

    #[test]
    fn success_near_one_for_rates_far_above_ceiling() {
        let th = table_thresholds();
        let r = HypotheticalRate::new(0.02, th.t_risk).unwrap();
        let exact = success_prob_at_rate(756, r, &table_prior(), &th, TailMode::Exact).unwrap();
        assert!((1.0 - exact).abs() < 1e-3, "exact = {exact}");
        let normal = success_prob_at_rate(756, r, &table_prior(), &th, TailMode::Normal).unwrap();
        assert!((1.0 - normal).abs() < 1e-3, "normal = {normal}");
    }

    #[test]
    fn modes_agree_for_large_expected_counts() {
        let th = table_thresholds();
        for &r in &[0.0066, 0.01, 0.02, 0.05] {
            let hr = HypotheticalRate::new(r, th.t_risk).unwrap();
            let e = success_prob_at_rate(756, hr, &table_prior(), &th, TailMode::Exact).unwrap();
            let n = success_prob_at_rate(756, hr, &table_prior(), &th, TailMode::Normal).unwrap();
            assert!(
                (e - n).abs() < 0.05,
                "modes differ by {} at r={r}",
                (e - n).abs()
            );
        }
    }

    #[test]
    fn hypothetical_rate_rejects_rates_at_or_below_ceiling() {
        assert!(HypotheticalRate::new(0.005, 0.005).is_err());
        assert!(HypotheticalRate::new(0.004, 0.005).is_err());
        assert!(HypotheticalRate::new(1.1, 0.005).is_err());
        assert!(HypotheticalRate::new(0.0051, 0.005).is_ok());
    }

    #[test]
    fn truncated_uniform_density_is_constant_two() {
        let uniform = BetaParams::new(1.0, 1.0).unwrap();
        for &r in &[0.51, 0.7, 0.99, 1.0] {
            let ld = truncated_prior_log_density(r, &uniform, 0.5).unwrap();
            assert_abs_diff_eq!(ld, 2.0f64.ln(), epsilon = 1e-9);
        }
        assert!(truncated_prior_log_density(0.5, &uniform, 0.5).is_err());
    }

    #[test]
    fn truncated_mass_matches_direct_tail_integral() {
        // independent reference: log of the unnormalized Beta kernel mass
        // above 0.005, computed in the r variable at high precision
        let ln_mass = ln_truncated_mass(&table_prior(), 0.005);
        assert_abs_diff_eq!(ln_mass, -88.33503240520417, epsilon = 1e-6);
    }

    #[test]
    fn truncated_density_integrates_to_one() {
        let prior = table_prior();
        let t_risk = 0.005;
        // break points crowd the left endpoint, where the truncated
        // density concentrates in a sliver a few 1e-4 wide
        let breaks: Vec<f64> = (1..=20)
            .map(|k| t_risk + (1.0 - t_risk) * 0.5f64.powi(k))
            .collect();
        let total = quad::integrate(
            |r| {
                truncated_prior_log_density(r, &prior, t_risk)
                    .unwrap()
                    .exp()
            },
            t_risk,
            1.0,
            1e-8,
            &breaks,
        );
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn weighted_success_zero_samples_is_zero_for_green_prior() {
        let th = table_thresholds();
        let w = weighted_success_prob(0, &table_prior(), &th, TailMode::Exact).unwrap();
        assert_eq!(w, 0.0);
    }

    #[test]
    fn weighted_success_saturates_with_volume() {
        let th = table_thresholds();
        let w = weighted_success_prob(100_000, &table_prior(), &th, TailMode::Exact).unwrap();
        assert!(w > 0.9999, "w = {w}");
    }

    #[test]
    fn weighted_success_frozen_values() {
        let th = table_thresholds();
        let exact756 = weighted_success_prob(756, &table_prior(), &th, TailMode::Exact).unwrap();
        assert_abs_diff_eq!(exact756, 0.9791546250875077, epsilon = 1e-6);
        assert!(exact756 >= 0.95);
        let normal757 = weighted_success_prob(757, &table_prior(), &th, TailMode::Normal).unwrap();
        assert_abs_diff_eq!(normal757, 0.9500050129424344, epsilon = 1e-6);
        // the recommended volume is minimal: one fewer sample misses the target
        let normal756 = weighted_success_prob(756, &table_prior(), &th, TailMode::Normal).unwrap();
        assert!(normal756 < 0.95, "weighted success at 756 was {normal756}");
    }

    #[test]
    fn rates_near_the_ceiling_need_more_than_the_weighted_average_says() {
        // the recommendation is an average over rates above the ceiling:
        // rates just above it succeed less often than the average, rates
        // far above it more often
        let th = table_thresholds();
        let prior = table_prior();
        let n_min = min_sample_size_from_prior(&prior, &th, &SizingOptions::default())
            .unwrap()
            .n_min;
        let weighted = weighted_success_prob(n_min, &prior, &th, TailMode::Normal).unwrap();
        let near = success_prob_at_rate(
            n_min,
            HypotheticalRate::new(0.00505, th.t_risk).unwrap(),
            &prior,
            &th,
            TailMode::Normal,
        )
        .unwrap();
        let far = success_prob_at_rate(
            n_min,
            HypotheticalRate::new(0.02, th.t_risk).unwrap(),
            &prior,
            &th,
            TailMode::Normal,
        )
        .unwrap();
        assert!(
            near < weighted,
            "near-ceiling success {near} vs weighted {weighted}"
        );
        assert!(
            far > weighted,
            "far-above success {far} vs weighted {weighted}"
        );
    }

    #[test]
    fn headline_minimum_sample_size() {
        let th = table_thresholds();
        let res = min_sample_size(&table_window(), &th, &SizingOptions::default()).unwrap();
        assert_eq!(res.n_min, 757);
        assert_eq!(res.y_crit, 1);
        assert!(res.achieved_success >= 0.95);
        // paper-level tolerance: within 3% of 756
        assert!((res.n_min as f64 - 756.0).abs() / 756.0 <= 0.03);

        let exact = min_sample_size(
            &table_window(),
            &th,
            &SizingOptions {
                mode: TailMode::Exact,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(exact.n_min, 586);
    }

    #[test]
    fn tighter_credible_level_requests_more_sampling() {
        let prior = table_prior();
        let mut previous = 0;
        for &level in &[0.94, 0.95, 0.96] {
            let th = Thresholds::tuned(&prior, 0.005, level).unwrap();
            let res = min_sample_size_from_prior(&prior, &th, &SizingOptions::default()).unwrap();
            assert!(res.n_min >= previous, "level {level} gave {}", res.n_min);
            previous = res.n_min;
        }
        assert!(previous >= 756);
    }

    #[test]
    fn one_past_leak_requests_more_than_zero() {
        let opts = SizingOptions::default();
        let clean = BetaParams::new(0.5, 10000.5).unwrap();
        let th0 = Thresholds::tuned(&clean, 0.01, 0.95).unwrap();
        let n0 = min_sample_size_from_prior(&clean, &th0, &opts)
            .unwrap()
            .n_min;

        let one = BetaParams::new(1.5, 9999.5).unwrap();
        let th1 = Thresholds::tuned(&one, 0.01, 0.95).unwrap();
        let n1 = min_sample_size_from_prior(&one, &th1, &opts).unwrap().n_min;
        assert!(n1 > n0, "expected more sampling after a leak: {n1} vs {n0}");
        // frozen solver outputs
        assert_eq!((n0, n1), (270, 278));
    }

    #[test]
    fn not_low_risk_prior_is_rejected() {
        let dirty = BetaParams::new(50.5, 50.5).unwrap();
        let th = Thresholds::new(0.005, 0.001, 0.95).unwrap();
        let err = min_sample_size_from_prior(&dirty, &th, &SizingOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotLowRisk { .. }));
    }

    #[test]
    fn cap_exhaustion_reports_no_solution() {
        let th = table_thresholds();
        let err = min_sample_size_from_prior(
            &table_prior(),
            &th,
            &SizingOptions {
                n_cap: 100,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoSolution { cap: 100, .. }));
    }
}
