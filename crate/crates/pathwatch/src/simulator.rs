//! Scenario engine: seeded pathway simulation, per-period method
//! application with rolling evidence windows, and the Monte Carlo sweeps
//! behind the status-proportion and sizing-sensitivity figures.
//!
//! Determinism contract: every random stream is a pure function of
//! (base seed, stream index, substream index), so traces and sweep cells
//! are reproducible across runs and across thread counts.

use rand::distributions::Distribution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::belief::{posterior_update, BetaParams, EvidenceWindow, InspectionBatch, TailMode};
use crate::comparators::{fixed_detection_size, power_analysis_size, FixedDesign, PowerDesign};
use crate::error::{Error, Result};
use crate::sizing::{min_sample_size, SizingOptions};
use crate::status::{classify, require_low_risk, ColourStatus, Thresholds};

/// Which sizing policy drives the simulated surveillance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodId {
    Adaptive,
    Power,
    Fixed,
}

impl std::fmt::Display for MethodId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MethodId::Adaptive => write!(f, "adaptive"),
            MethodId::Power => write!(f, "power"),
            MethodId::Fixed => write!(f, "fixed"),
        }
    }
}

/// How Bernoulli trials are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DrawStyle {
    /// One binomial draw per period.
    #[default]
    Counting,
    /// n independent Bernoulli draws; distributionally identical, slower.
    PerTrial,
}

/// Piecewise-constant true leakage rate over the simulated periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSegment {
    pub start_period: u64,
    pub true_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSchedule {
    pub segments: Vec<RateSegment>,
    pub n_periods: u64,
}

impl ScenarioSchedule {
    pub fn new(segments: Vec<RateSegment>, n_periods: u64) -> Result<Self> {
        if n_periods == 0 {
            return Err(Error::validation("schedule needs at least one period"));
        }
        if segments.first().map(|s| s.start_period) != Some(1) {
            return Err(Error::validation(
                "first rate segment must start at period 1",
            ));
        }
        for pair in segments.windows(2) {
            if pair[1].start_period <= pair[0].start_period {
                return Err(Error::validation(
                    "segment start periods must be strictly increasing",
                ));
            }
        }
        for s in &segments {
            if !(0.0..=1.0).contains(&s.true_rate) {
                return Err(Error::validation(format!(
                    "true rate {} outside [0, 1]",
                    s.true_rate
                )));
            }
        }
        Ok(Self {
            segments,
            n_periods,
        })
    }

    /// Constant-rate schedule.
    pub fn constant(rate: f64, n_periods: u64) -> Result<Self> {
        Self::new(
            vec![RateSegment {
                start_period: 1,
                true_rate: rate,
            }],
            n_periods,
        )
    }

    pub fn rate_at(&self, period: u64) -> f64 {
        self.segments
            .iter()
            .rev()
            .find(|s| s.start_period <= period)
            .map(|s| s.true_rate)
            .unwrap_or(0.0)
    }
}

/// Method-independent simulation configuration (Table-2-style defaults).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub t_risk: f64,
    pub credible_level: f64,
    pub window_len: usize,
    pub mode: TailMode,
    pub target: f64,
    pub n_cap: u64,
    /// Prior (inspected, contaminated) pairs forming the initial window.
    pub prior_batches: Vec<(u64, u64)>,
    pub fixed: FixedDesign,
    pub power_alpha: f64,
    pub power_power: f64,
    pub draw_style: DrawStyle,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            t_risk: 0.005,
            credible_level: 0.95,
            window_len: 2,
            mode: TailMode::Normal,
            target: 0.95,
            n_cap: 1_000_000,
            prior_batches: vec![(5000, 3), (5000, 3)],
            fixed: FixedDesign::default(),
            power_alpha: 0.05,
            power_power: 0.95,
            draw_style: DrawStyle::Counting,
        }
    }
}

impl SimulationConfig {
    pub fn initial_window(&self) -> Result<EvidenceWindow> {
        let batches = self
            .prior_batches
            .iter()
            .enumerate()
            .map(|(i, &(n, y))| InspectionBatch::new(i as u64 + 1, n, y))
            .collect::<Result<Vec<_>>>()?;
        EvidenceWindow::new(batches, self.window_len)
    }

    fn sizing_options(&self) -> SizingOptions {
        SizingOptions {
            target: self.target,
            mode: self.mode,
            n_cap: self.n_cap,
        }
    }

    fn power_design(&self) -> PowerDesign {
        PowerDesign {
            cutoff: self.t_risk,
            alpha: self.power_alpha,
            power: self.power_power,
            n_cap: self.n_cap,
        }
    }
}

/// Why a trace stopped before the scheduled horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    /// The posterior went red under the adaptive method.
    RedStatus,
    /// The rolled window no longer satisfies the low-risk requirement.
    PriorNotLowRisk,
    /// The power surrogate's estimated rate reached its cutoff.
    DegenerateRate,
    /// No sample size under the cap met the target.
    NoSolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaltEvent {
    pub period: u64,
    pub reason: HaltReason,
}

/// One simulated reporting period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub period: u64,
    pub method: MethodId,
    pub n_sampled: u64,
    pub y_detected: u64,
    pub prior_alpha: f64,
    pub prior_beta: f64,
    pub posterior_alpha: f64,
    pub posterior_beta: f64,
    pub t_change: f64,
    pub status: ColourStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub method: MethodId,
    pub seed: u64,
    pub config_hash: String,
    pub records: Vec<PeriodRecord>,
    pub halt: Option<HaltEvent>,
}

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(SPLITMIX_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-(stream, substream) generator derived from the base
/// seed; replications never share streams.
pub fn stream_rng(base_seed: u64, stream: u64, substream: u64) -> ChaCha8Rng {
    let s = mix64(mix64(mix64(base_seed) ^ stream.wrapping_mul(0xA24B_AED4_963E_E407)) ^ substream);
    ChaCha8Rng::seed_from_u64(s)
}

/// Draws the period's contamination count: y ~ Binomial(n, true_rate).
pub fn run_period(true_rate: f64, n: u64, rng: &mut ChaCha8Rng, style: DrawStyle) -> u64 {
    match style {
        DrawStyle::Counting => rand_distr::Binomial::new(n, true_rate)
            .expect("rate validated in [0, 1]")
            .sample(rng),
        DrawStyle::PerTrial => {
            let mut y = 0;
            for _ in 0..n {
                if rng.gen_bool(true_rate) {
                    y += 1;
                }
            }
            y
        }
    }
}

/// Runs one surveillance scenario: size, sample, update, classify, roll.
///
/// The adaptive method halts with a flagged trace when the posterior goes
/// red or a rolled window stops being low-risk; initialization errors are
/// returned instead because the method's preconditions never held.
pub fn run_scenario(
    schedule: &ScenarioSchedule,
    method: MethodId,
    config: &SimulationConfig,
    seed: u64,
) -> Result<SimulationTrace> {
    let mut window = config.initial_window()?;
    let opts = config.sizing_options();
    let power = config.power_design();
    let fixed_n = fixed_detection_size(&config.fixed)?;
    let config_hash = crate::report::config_hash(&(&schedule, method, config));

    // preconditions at initialization
    match method {
        MethodId::Adaptive => {
            require_low_risk(&window.belief(), config.t_risk, config.credible_level)?
        }
        MethodId::Power => {
            power_analysis_size(&window, &power, config.mode).map(|_| ())?;
        }
        MethodId::Fixed => {}
    }

    let mut trace = SimulationTrace {
        method,
        seed,
        config_hash,
        records: Vec::with_capacity(schedule.n_periods as usize),
        halt: None,
    };
    let period_offset = window.last_period().unwrap_or(0);

    for period in 1..=schedule.n_periods {
        let prior = window.belief();
        let thresholds = match Thresholds::tuned(&prior, config.t_risk, config.credible_level) {
            Ok(t) => t,
            Err(_) => {
                trace.halt = Some(HaltEvent {
                    period,
                    reason: HaltReason::PriorNotLowRisk,
                });
                break;
            }
        };

        let n = match method {
            MethodId::Adaptive => match min_sample_size(&window, &thresholds, &opts) {
                Ok(res) => res.n_min,
                Err(Error::NotLowRisk { .. }) => {
                    trace.halt = Some(HaltEvent {
                        period,
                        reason: HaltReason::PriorNotLowRisk,
                    });
                    break;
                }
                Err(Error::NoSolution { .. }) => {
                    trace.halt = Some(HaltEvent {
                        period,
                        reason: HaltReason::NoSolution,
                    });
                    break;
                }
                Err(e) => return Err(e),
            },
            MethodId::Power => match power_analysis_size(&window, &power, config.mode) {
                Ok(n) => n,
                Err(Error::DegenerateRate { .. }) => {
                    trace.halt = Some(HaltEvent {
                        period,
                        reason: HaltReason::DegenerateRate,
                    });
                    break;
                }
                Err(Error::NoSolution { .. }) => {
                    trace.halt = Some(HaltEvent {
                        period,
                        reason: HaltReason::NoSolution,
                    });
                    break;
                }
                Err(e) => return Err(e),
            },
            MethodId::Fixed => fixed_n,
        };

        let rate = schedule.rate_at(period);
        let mut rng = stream_rng(seed, period, 0);
        let y = run_period(rate, n, &mut rng, config.draw_style);

        let batch = InspectionBatch::new(period_offset + period, n, y)?;
        let posterior = posterior_update(prior, &batch)?;
        let status = classify(&posterior, &thresholds);
        trace.records.push(PeriodRecord {
            period,
            method,
            n_sampled: n,
            y_detected: y,
            prior_alpha: prior.alpha,
            prior_beta: prior.beta,
            posterior_alpha: posterior.alpha,
            posterior_beta: posterior.beta,
            t_change: thresholds.t_change,
            status,
        });

        window = window.roll(batch)?;
        if status == ColourStatus::Red && method == MethodId::Adaptive {
            trace.halt = Some(HaltEvent {
                period,
                reason: HaltReason::RedStatus,
            });
            break;
        }
    }
    Ok(trace)
}

/// Colour tallies for one true-rate grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatusCell {
    pub true_rate: f64,
    pub green: u64,
    pub orange: u64,
    pub red: u64,
    pub prop_green: f64,
    pub prop_orange: f64,
    pub prop_red: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatusSweepResult {
    pub n1: u64,
    pub iterations: u64,
    pub seed: u64,
    pub config_hash: String,
    pub cells: Vec<StatusCell>,
}

/// Posterior colour proportions after one period of n1 samples, for each
/// true rate on the grid. Cells run in parallel; each (cell, iteration)
/// pair owns a derived stream, so results do not depend on thread count.
pub fn status_sweep(
    prior_window: &EvidenceWindow,
    thresholds: &Thresholds,
    n1: u64,
    rate_grid: &[f64],
    iterations: u64,
    seed: u64,
) -> Result<StatusSweepResult> {
    if n1 == 0 {
        return Err(Error::validation("status sweep needs n1 > 0"));
    }
    if iterations == 0 {
        return Err(Error::validation(
            "status sweep needs at least one iteration",
        ));
    }
    for &r in rate_grid {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::validation(format!("true rate {r} outside [0, 1]")));
        }
    }
    let prior = prior_window.belief();
    let config_hash =
        crate::report::config_hash(&(&prior_window, thresholds, n1, rate_grid, iterations));

    let cells: Vec<StatusCell> = rate_grid
        .par_iter()
        .enumerate()
        .map(|(cell_idx, &rate)| {
            let mut green = 0u64;
            let mut orange = 0u64;
            let mut red = 0u64;
            for iter in 0..iterations {
                let mut rng = stream_rng(seed, cell_idx as u64, iter);
                let y = run_period(rate, n1, &mut rng, DrawStyle::Counting);
                let posterior = BetaParams {
                    alpha: prior.alpha + y as f64,
                    beta: prior.beta + (n1 - y) as f64,
                };
                match classify(&posterior, thresholds) {
                    ColourStatus::Green => green += 1,
                    ColourStatus::Orange => orange += 1,
                    ColourStatus::Red => red += 1,
                }
            }
            let it = iterations as f64;
            let prop_green = green as f64 / it;
            let prop_orange = orange as f64 / it;
            StatusCell {
                true_rate: rate,
                green,
                orange,
                red,
                prop_green,
                prop_orange,
                // complement keeps the three proportions summing to one
                prop_red: 1.0 - prop_green - prop_orange,
            }
        })
        .collect();

    Ok(StatusSweepResult {
        n1,
        iterations,
        seed,
        config_hash,
        cells,
    })
}

/// Which input the sizing sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    TRisk,
    Y0,
    N0,
    CredibleLevel,
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepAxis::TRisk => write!(f, "t_risk"),
            SweepAxis::Y0 => write!(f, "y0"),
            SweepAxis::N0 => write!(f, "n0"),
            SweepAxis::CredibleLevel => write!(f, "credible_level"),
        }
    }
}

/// Fixed inputs for a sizing sweep; the axis value overrides one of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepBase {
    pub n0: u64,
    pub y0: u64,
    pub t_risk: f64,
    pub credible_level: f64,
    pub target: f64,
    pub mode: TailMode,
    pub n_cap: u64,
}

impl Default for SweepBase {
    fn default() -> Self {
        Self {
            n0: 10000,
            y0: 6,
            t_risk: 0.005,
            credible_level: 0.95,
            target: 0.95,
            mode: TailMode::Normal,
            n_cap: 1_000_000,
        }
    }
}

/// One sizing-sweep grid point: either a recommendation or a short error
/// code (`not_low_risk`, `no_solution`, `invalid`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingPoint {
    pub value: f64,
    pub n_min: Option<u64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingSweepResult {
    pub axis: SweepAxis,
    pub base: SweepBase,
    pub config_hash: String,
    pub points: Vec<SizingPoint>,
}

/// Minimum sample size across a one-dimensional grid of configurations.
/// Non-sizeable points are recorded, not fatal.
pub fn sizing_sweep(axis: SweepAxis, grid: &[f64], base: &SweepBase) -> SizingSweepResult {
    let config_hash = crate::report::config_hash(&(axis, grid, base));
    let points: Vec<SizingPoint> = grid
        .par_iter()
        .map(|&value| {
            let mut n0 = base.n0;
            let mut y0 = base.y0;
            let mut t_risk = base.t_risk;
            let mut level = base.credible_level;
            match axis {
                SweepAxis::TRisk => t_risk = value,
                SweepAxis::Y0 => y0 = value.round() as u64,
                SweepAxis::N0 => n0 = value.round() as u64,
                SweepAxis::CredibleLevel => level = value,
            }
            let outcome = (|| {
                if y0 > n0 {
                    return Err(Error::validation(
                        "past contaminated exceeds past inspected",
                    ));
                }
                let prior = BetaParams::new(0.5 + y0 as f64, 0.5 + (n0 - y0) as f64)?;
                // check low-risk first so boundary collisions between the
                // tuned threshold and the ceiling report as not_low_risk
                require_low_risk(&prior, t_risk, level)?;
                let thresholds = Thresholds::tuned(&prior, t_risk, level)?;
                let opts = SizingOptions {
                    target: base.target,
                    mode: base.mode,
                    n_cap: base.n_cap,
                };
                crate::sizing::min_sample_size_from_prior(&prior, &thresholds, &opts)
            })();
            match outcome {
                Ok(res) => SizingPoint {
                    value,
                    n_min: Some(res.n_min),
                    error: None,
                },
                Err(Error::NotLowRisk { .. }) => SizingPoint {
                    value,
                    n_min: None,
                    error: Some("not_low_risk".into()),
                },
                Err(Error::NoSolution { .. }) => SizingPoint {
                    value,
                    n_min: None,
                    error: Some("no_solution".into()),
                },
                Err(_) => SizingPoint {
                    value,
                    n_min: None,
                    error: Some("invalid".into()),
                },
            }
        })
        .collect();
    SizingSweepResult {
        axis,
        base: *base,
        config_hash,
        points,
    }
}
