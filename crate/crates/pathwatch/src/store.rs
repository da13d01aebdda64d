//! Operator-facing pathway state: record real inspection results, get
//! recommendations and statuses, persist everything as a single auditable
//! JSON file with atomic writes and an advisory lock.
//!
//! The derived cache is always recomputable from config + history; a
//! rebuild from the event history must reproduce the stored state exactly.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::belief::{posterior_update, BetaParams, EvidenceWindow, InspectionBatch, TailMode};
use crate::comparators::{fixed_detection_size, power_analysis_size, FixedDesign, PowerDesign};
use crate::error::{Error, Result};
use crate::sizing::{min_sample_size, SizingOptions, SizingResult};
use crate::status::{classify, require_low_risk, tune_change_threshold, ColourStatus, Thresholds};

pub const SCHEMA_VERSION: u32 = 1;

/// Persistent pathway configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathwayConfig {
    pub t_risk: f64,
    pub credible_level: f64,
    pub window_len: usize,
    pub mode: TailMode,
    pub target: f64,
    pub n_cap: u64,
}

impl Default for PathwayConfig {
    fn default() -> Self {
        Self {
            t_risk: 0.005,
            credible_level: 0.95,
            window_len: 2,
            mode: TailMode::Normal,
            target: 0.95,
            n_cap: 1_000_000,
        }
    }
}

impl PathwayConfig {
    fn sizing_options(&self) -> SizingOptions {
        SizingOptions {
            target: self.target,
            mode: self.mode,
            n_cap: self.n_cap,
        }
    }
}

/// Either a sizing recommendation or the short reason none is available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recommendation {
    Sized(SizingResult),
    Blocked { reason: String },
}

/// Derived values cached for display; recomputable from config + history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedCache {
    /// Belief implied by the current evidence window.
    pub belief: BetaParams,
    /// Change threshold in force for the next reporting period.
    pub t_change: f64,
    /// Status evaluated at the most recent update.
    pub status: ColourStatus,
    pub recommendation: Recommendation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathwayState {
    pub schema_version: u32,
    pub config: PathwayConfig,
    /// Every batch ever seen, in period order; the first `prior_len`
    /// entries were supplied at initialization.
    pub history: Vec<InspectionBatch>,
    pub prior_len: usize,
    pub cache: DerivedCache,
}

/// What one recorded period looked like before the window rolled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordOutcome {
    pub period: u64,
    pub prior: BetaParams,
    pub posterior: BetaParams,
    pub t_change_in_force: f64,
    pub status: ColourStatus,
}

fn window_from_history(
    config: &PathwayConfig,
    history: &[InspectionBatch],
) -> Result<EvidenceWindow> {
    let mut w = EvidenceWindow::new(vec![], config.window_len)?;
    for b in history {
        w = w.roll(*b)?;
    }
    Ok(w)
}

fn build_cache(
    config: &PathwayConfig,
    window: &EvidenceWindow,
    status: ColourStatus,
) -> Result<DerivedCache> {
    let belief = window.belief();
    let t_change = tune_change_threshold(&belief, config.credible_level)?;
    let recommendation = match Thresholds::new(config.t_risk, t_change, config.credible_level) {
        Ok(thresholds) => match min_sample_size(window, &thresholds, &config.sizing_options()) {
            Ok(r) => Recommendation::Sized(r),
            Err(Error::NotLowRisk { .. }) => Recommendation::Blocked {
                reason: "not_low_risk".into(),
            },
            Err(Error::NoSolution { .. }) => Recommendation::Blocked {
                reason: "no_solution".into(),
            },
            Err(e) => return Err(e),
        },
        // tuned threshold collided with the risk ceiling: the window no
        // longer supports green status at all
        Err(_) => Recommendation::Blocked {
            reason: "not_low_risk".into(),
        },
    };
    Ok(DerivedCache {
        belief,
        t_change,
        status,
        recommendation,
    })
}

/// Creates a pathway state from historical prior batches.
///
/// The batches must establish a low-risk pathway; with no data at all the
/// operator is pointed at supplying elicited or proxy priors instead.
pub fn init(config: PathwayConfig, prior_counts: &[(u64, u64)]) -> Result<PathwayState> {
    if prior_counts.is_empty() || prior_counts.iter().all(|&(n, _)| n == 0) {
        return Err(Error::validation(
            "no prior inspection data: supply historical batches, proxy data from a similar \
             pathway, or an elicited starting belief",
        ));
    }
    let history: Vec<InspectionBatch> = prior_counts
        .iter()
        .enumerate()
        .map(|(i, &(n, y))| InspectionBatch::new(i as u64 + 1, n, y))
        .collect::<Result<_>>()?;
    let window = window_from_history(&config, &history)?;
    let belief = window.belief();
    require_low_risk(&belief, config.t_risk, config.credible_level)?;

    let t_change = tune_change_threshold(&belief, config.credible_level)?;
    let thresholds = Thresholds::new(config.t_risk, t_change, config.credible_level)?;
    let status = classify(&belief, &thresholds);
    let cache = build_cache(&config, &window, status)?;
    Ok(PathwayState {
        schema_version: SCHEMA_VERSION,
        config,
        prior_len: history.len(),
        history,
        cache,
    })
}

/// Records one period's inspection outcome: update, classify against the
/// threshold in force, roll the window, re-tune, persistable state out.
///
/// A red status is reported in the outcome and the state is still updated;
/// refusing to record bad news would defeat the audit trail.
pub fn record(
    state: &PathwayState,
    n_inspected: u64,
    n_contaminated: u64,
) -> Result<(PathwayState, RecordOutcome)> {
    let period = state.history.last().map(|b| b.period + 1).unwrap_or(1);
    let batch = InspectionBatch::new(period, n_inspected, n_contaminated)?;

    let window = window_from_history(&state.config, &state.history)?;
    let prior = window.belief();
    let t_change_in_force = state.cache.t_change;
    let posterior = posterior_update(prior, &batch)?;

    let status = match Thresholds::new(
        state.config.t_risk,
        t_change_in_force,
        state.config.credible_level,
    ) {
        Ok(thresholds) => classify(&posterior, &thresholds),
        // change threshold collided with the ceiling: only the risk
        // condition remains meaningful
        Err(_) => {
            if crate::status::assert_low_risk(
                &posterior,
                state.config.t_risk,
                state.config.credible_level,
            ) {
                ColourStatus::Orange
            } else {
                ColourStatus::Red
            }
        }
    };

    let rolled = window.roll(batch)?;
    let cache = build_cache(&state.config, &rolled, status)?;

    let mut history = state.history.clone();
    history.push(batch);
    let next = PathwayState {
        schema_version: state.schema_version,
        config: state.config,
        history,
        prior_len: state.prior_len,
        cache,
    };
    let outcome = RecordOutcome {
        period,
        prior,
        posterior,
        t_change_in_force,
        status,
    };
    Ok((next, outcome))
}

/// Recommends the minimum sample size for the next period. The state is
/// not modified; a red pathway has no meaningful recommendation.
pub fn recommend(state: &PathwayState) -> Result<SizingResult> {
    if state.cache.status == ColourStatus::Red {
        return Err(Error::RedStatus);
    }
    let window = window_from_history(&state.config, &state.history)?;
    let belief = window.belief();
    let t_change = tune_change_threshold(&belief, state.config.credible_level)?;
    let thresholds = Thresholds::new(state.config.t_risk, t_change, state.config.credible_level)?;
    min_sample_size(&window, &thresholds, &state.config.sizing_options())
}

/// All three methods' recommendations for the current window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub fixed: u64,
    pub adaptive: Option<u64>,
    pub adaptive_error: Option<String>,
    pub power: Option<u64>,
    pub power_error: Option<String>,
}

pub fn compare(state: &PathwayState, mode: TailMode) -> Result<Comparison> {
    let window = window_from_history(&state.config, &state.history)?;
    let fixed = fixed_detection_size(&FixedDesign::default())?;
    let adaptive = (|| {
        let belief = window.belief();
        let t_change = tune_change_threshold(&belief, state.config.credible_level)?;
        let thresholds =
            Thresholds::new(state.config.t_risk, t_change, state.config.credible_level)?;
        let opts = SizingOptions {
            mode,
            ..state.config.sizing_options()
        };
        min_sample_size(&window, &thresholds, &opts)
    })();
    let power = power_analysis_size(
        &window,
        &PowerDesign {
            n_cap: state.config.n_cap,
            ..PowerDesign::new(state.config.t_risk)
        },
        mode,
    );
    let (adaptive, adaptive_error) = match adaptive {
        Ok(r) => (Some(r.n_min), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (power, power_error) = match power {
        Ok(n) => (Some(n), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(Comparison {
        fixed,
        adaptive,
        adaptive_error,
        power,
        power_error,
    })
}

/// Rebuilds the state by replaying the full history through init + record;
/// the event-sourcing audit.
pub fn rebuild(
    config: PathwayConfig,
    history: &[InspectionBatch],
    prior_len: usize,
) -> Result<PathwayState> {
    if prior_len == 0 || prior_len > history.len() {
        return Err(Error::validation(format!(
            "prior length {prior_len} inconsistent with history of {} batches",
            history.len()
        )));
    }
    let prior_counts: Vec<(u64, u64)> = history[..prior_len]
        .iter()
        .map(|b| (b.n_inspected, b.n_contaminated))
        .collect();
    let mut state = init(config, &prior_counts)?;
    for b in &history[prior_len..] {
        let (next, _) = record(&state, b.n_inspected, b.n_contaminated)?;
        state = next;
    }
    Ok(state)
}

/// Verifies that the stored cache equals a full replay of the history.
pub fn verify_integrity(state: &PathwayState) -> Result<()> {
    let replayed = rebuild(state.config, &state.history, state.prior_len)?;
    if replayed == *state {
        Ok(())
    } else {
        Err(Error::validation(
            "state file failed the replay audit: derived cache does not match its history",
        ))
    }
}

/// Advisory single-writer lock: a sibling `.lock` file created exclusively
/// and removed on drop.
pub struct StateLock {
    path: PathBuf,
}

impl StateLock {
    pub fn acquire(state_path: &Path) -> Result<Self> {
        let path = lock_path(state_path);
        match fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
        {
            Ok(_) => Ok(Self { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(Error::Locked(path.display().to_string()))
            }
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for StateLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn lock_path(state_path: &Path) -> PathBuf {
    let mut os = state_path.as_os_str().to_owned();
    os.push(".lock");
    PathBuf::from(os)
}

/// Atomic save: write a sibling temp file, then rename over the target.
pub fn save(state: &PathwayState, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(state)? + "\n";
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, json)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<PathwayState> {
    let text = fs::read_to_string(path)?;
    let state: PathwayState = serde_json::from_str(&text)?;
    if state.schema_version != SCHEMA_VERSION {
        return Err(Error::validation(format!(
            "unsupported state schema version {} (expected {SCHEMA_VERSION})",
            state.schema_version
        )));
    }
    Ok(state)
}
