//! Thin CLI over the pathwatch library: persistent pathway state plus
//! simulation and sweep runners. Exit codes: 0 ok, 2 validation,
//! 3 not-low-risk/red-status, 4 no-solution.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use pathwatch::belief::TailMode;
use pathwatch::error::Error;
use pathwatch::report;
use pathwatch::simulator::{
    run_scenario, sizing_sweep, status_sweep, MethodId, RateSegment, ScenarioSchedule,
    SimulationConfig, SweepAxis, SweepBase,
};
use pathwatch::sizing::min_sample_size_from_prior;
use pathwatch::status::Thresholds;
use pathwatch::store::{self, PathwayConfig, Recommendation};

#[derive(Parser)]
#[command(
    name = "pathwatch",
    version,
    about = "Adaptive inspection sampling for low-risk pathways"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ModeArg {
    Exact,
    Normal,
}

impl From<ModeArg> for TailMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => TailMode::Exact,
            ModeArg::Normal => TailMode::Normal,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct StateArg {
    /// Pathway state file.
    #[arg(long)]
    state: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Create a pathway state file from historical inspection batches.
    Init {
        #[command(flatten)]
        state: StateArg,
        /// Low-risk ceiling, e.g. 0.005.
        #[arg(long, default_value_t = 0.005)]
        t_risk: f64,
        /// One-sided credible level.
        #[arg(long, default_value_t = 0.95)]
        credible_level: f64,
        /// Reporting periods retained as the rolling prior.
        #[arg(long, default_value_t = 2)]
        window_len: usize,
        /// Sizing tail mode.
        #[arg(long, value_enum, default_value = "normal")]
        mode: ModeArg,
        /// Weighted escalation target.
        #[arg(long, default_value_t = 0.95)]
        target: f64,
        /// Search cap for the sizing solver.
        #[arg(long, default_value_t = 1_000_000)]
        n_cap: u64,
        /// Prior batch as inspected:contaminated, repeatable.
        #[arg(long = "prior", value_parser = parse_counts, required = true)]
        priors: Vec<(u64, u64)>,
    },
    /// Recommend the minimum sample size for the next period.
    Recommend {
        #[command(flatten)]
        state: StateArg,
    },
    /// Record one period's inspection outcome.
    Record {
        #[command(flatten)]
        state: StateArg,
        #[arg(long)]
        inspected: u64,
        #[arg(long)]
        contaminated: u64,
    },
    /// Show the pathway's current belief, thresholds, and status.
    Status {
        #[command(flatten)]
        state: StateArg,
    },
    /// Print all three methods' recommendations side by side.
    Compare {
        #[command(flatten)]
        state: StateArg,
        #[arg(long, value_enum, default_value = "normal")]
        mode: ModeArg,
    },
    /// Run a scenario spec and write the trace.
    Simulate {
        /// Scenario spec (TOML).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Run a sweep spec and write the grid results.
    Sweep {
        /// Sweep spec (TOML).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
}

fn parse_counts(s: &str) -> Result<(u64, u64), String> {
    let (n, y) = s
        .split_once(':')
        .ok_or_else(|| format!("expected inspected:contaminated, got {s}"))?;
    let n = n.trim().parse::<u64>().map_err(|e| e.to_string())?;
    let y = y.trim().parse::<u64>().map_err(|e| e.to_string())?;
    Ok((n, y))
}

/// Scenario spec file layout.
#[derive(Deserialize)]
struct ScenarioSpec {
    scenario: ScenarioSection,
    #[serde(default)]
    config: SimulationConfig,
}

#[derive(Deserialize)]
struct ScenarioSection {
    method: MethodId,
    n_periods: u64,
    segments: Vec<SegmentSpec>,
}

#[derive(Deserialize)]
struct SegmentSpec {
    start_period: u64,
    true_rate: f64,
}

/// Sweep spec file layout: `kind = "status"` or `kind = "sizing"`.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SweepSpec {
    Status {
        rates: Vec<f64>,
        iterations: u64,
        /// Fixed sample size per cell; omit to use the solver's answer.
        n1: Option<u64>,
        #[serde(default)]
        config: SimulationConfig,
    },
    Sizing {
        axis: SweepAxis,
        grid: Vec<f64>,
        #[serde(default)]
        base: SweepBase,
        /// Optional second axis: repeat the sweep for each of these
        /// credible levels (sensitivity bands).
        #[serde(default)]
        credible_levels: Vec<f64>,
        /// Optional second axis: repeat the sweep for each past count.
        #[serde(default)]
        y0_values: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotLowRisk { .. } | Error::RedStatus => 3,
        Error::NoSolution { .. } | Error::DegenerateRate { .. } => 4,
        _ => 2,
    }
}

fn run(cli: Cli) -> pathwatch::Result<()> {
    match cli.command {
        Command::Init {
            state,
            t_risk,
            credible_level,
            window_len,
            mode,
            target,
            n_cap,
            priors,
        } => {
            let config = PathwayConfig {
                t_risk,
                credible_level,
                window_len,
                mode: mode.into(),
                target,
                n_cap,
            };
            let _lock = store::StateLock::acquire(&state.state)?;
            let st = store::init(config, &priors)?;
            store::save(&st, &state.state)?;
            println!(
                "initialized {} [config {}]",
                state.state.display(),
                report::config_hash(&st.config)
            );
            print_summary(&st);
            Ok(())
        }
        Command::Recommend { state } => {
            let st = store::load(&state.state)?;
            let r = store::recommend(&st)?;
            println!(
                "config {} | n_min {} | y_crit {} | t_change {} | achieved success {} | mode {}",
                report::config_hash(&st.config),
                r.n_min,
                r.y_crit,
                report::sig6(st.cache.t_change),
                report::sig6(r.achieved_success),
                r.mode
            );
            println!("{}", serde_json::to_string(&r)?);
            Ok(())
        }
        Command::Record {
            state,
            inspected,
            contaminated,
        } => {
            let _lock = store::StateLock::acquire(&state.state)?;
            let st = store::load(&state.state)?;
            let (next, outcome) = store::record(&st, inspected, contaminated)?;
            store::save(&next, &state.state)?;
            println!(
                "recorded period {}: {} inspected, {} contaminated [config {}]",
                outcome.period,
                inspected,
                contaminated,
                report::config_hash(&next.config)
            );
            println!(
                "posterior Beta({}, {}) against t_change {} -> status {}",
                outcome.posterior.alpha,
                outcome.posterior.beta,
                report::sig6(outcome.t_change_in_force),
                outcome.status
            );
            if outcome.status == pathwatch::ColourStatus::Red {
                eprintln!(
                    "WARNING: pathway status is RED; separate the high-risk subpathway before continuing surveillance"
                );
            }
            print_summary(&next);
            Ok(())
        }
        Command::Status { state } => {
            let st = store::load(&state.state)?;
            store::verify_integrity(&st)?;
            println!(
                "state {} [config {}]",
                state.state.display(),
                report::config_hash(&st.config)
            );
            print_summary(&st);
            Ok(())
        }
        Command::Compare { state, mode } => {
            let st = store::load(&state.state)?;
            let c = store::compare(&st, mode.into())?;
            println!(
                "config {} | mode {}",
                report::config_hash(&st.config),
                TailMode::from(mode)
            );
            println!("fixed    : {}", c.fixed);
            match (c.adaptive, &c.adaptive_error) {
                (Some(n), _) => println!("adaptive : {n}"),
                (None, Some(e)) => println!("adaptive : unavailable ({e})"),
                _ => {}
            }
            match (c.power, &c.power_error) {
                (Some(n), _) => println!("power    : {n}"),
                (None, Some(e)) => println!("power    : unavailable ({e})"),
                _ => {}
            }
            Ok(())
        }
        Command::Simulate {
            spec,
            seed,
            out,
            format,
        } => {
            let text = std::fs::read_to_string(&spec)?;
            let parsed: ScenarioSpec = toml::from_str(&text)?;
            let schedule = ScenarioSchedule::new(
                parsed
                    .scenario
                    .segments
                    .iter()
                    .map(|s| RateSegment {
                        start_period: s.start_period,
                        true_rate: s.true_rate,
                    })
                    .collect(),
                parsed.scenario.n_periods,
            )?;
            let trace = run_scenario(&schedule, parsed.scenario.method, &parsed.config, seed)?;
            println!(
                "simulated {} periods with the {} method [seed {seed}, config {}]{}",
                trace.records.len(),
                trace.method,
                trace.config_hash,
                trace
                    .halt
                    .map(|h| format!(" halted at period {} ({:?})", h.period, h.reason))
                    .unwrap_or_default()
            );
            let body = match format {
                FormatArg::Csv => report::trace_to_csv(&trace),
                FormatArg::Json => report::trace_to_json(&trace),
            };
            write_out(out.as_deref(), &body)
        }
        Command::Sweep {
            spec,
            seed,
            out,
            format,
        } => {
            let text = std::fs::read_to_string(&spec)?;
            let parsed: SweepSpec = toml::from_str(&text)?;
            let body = match parsed {
                SweepSpec::Status {
                    rates,
                    iterations,
                    n1,
                    config,
                } => {
                    let window = config.initial_window()?;
                    let belief = window.belief();
                    let thresholds =
                        Thresholds::tuned(&belief, config.t_risk, config.credible_level)?;
                    let n1 = match n1 {
                        Some(n) => n,
                        None => {
                            let opts = pathwatch::SizingOptions {
                                target: config.target,
                                mode: config.mode,
                                n_cap: config.n_cap,
                            };
                            min_sample_size_from_prior(&belief, &thresholds, &opts)?.n_min
                        }
                    };
                    let sweep = status_sweep(&window, &thresholds, n1, &rates, iterations, seed)?;
                    println!(
                        "status sweep over {} rates x {} iterations at n1 = {} [seed {seed}, config {}]",
                        sweep.cells.len(),
                        iterations,
                        n1,
                        sweep.config_hash
                    );
                    match format {
                        FormatArg::Csv => report::status_sweep_to_csv(&sweep),
                        FormatArg::Json => report::status_sweep_to_json(&sweep),
                    }
                }
                SweepSpec::Sizing {
                    axis,
                    grid,
                    base,
                    credible_levels,
                    y0_values,
                } => {
                    let levels = if credible_levels.is_empty() {
                        vec![base.credible_level]
                    } else {
                        credible_levels
                    };
                    let y0s = if y0_values.is_empty() {
                        vec![base.y0 as f64]
                    } else {
                        y0_values
                    };
                    let mut sweeps = Vec::new();
                    for &level in &levels {
                        for &y0 in &y0s {
                            let b = SweepBase {
                                credible_level: level,
                                y0: y0.round() as u64,
                                ..base
                            };
                            sweeps.push(sizing_sweep(axis, &grid, &b));
                        }
                    }
                    println!(
                        "sizing sweep along {axis}: {} grid points x {} bands [config base {}]",
                        grid.len(),
                        sweeps.len(),
                        report::config_hash(&base)
                    );
                    match format {
                        FormatArg::Csv => {
                            // long form: one row per (band, grid point)
                            let mut body = String::from(
                                "axis,value,credible_level,y0,n_min,error,config_hash\n",
                            );
                            for s in &sweeps {
                                for p in &s.points {
                                    body.push_str(&format!(
                                        "{},{},{},{},{},{},{}\n",
                                        s.axis,
                                        p.value,
                                        s.base.credible_level,
                                        s.base.y0,
                                        p.n_min.map(|n| n.to_string()).unwrap_or_default(),
                                        p.error.clone().unwrap_or_default(),
                                        s.config_hash
                                    ));
                                }
                            }
                            body
                        }
                        FormatArg::Json => serde_json::to_string_pretty(&sweeps)? + "\n",
                    }
                }
            };
            write_out(out.as_deref(), &body)
        }
    }
}

fn print_summary(st: &store::PathwayState) {
    println!(
        "belief Beta({}, {}) | t_change {} | status {} | {} batches recorded",
        st.cache.belief.alpha,
        st.cache.belief.beta,
        report::sig6(st.cache.t_change),
        st.cache.status,
        st.history.len()
    );
    match &st.cache.recommendation {
        Recommendation::Sized(r) => println!(
            "next period: sample at least {} items (escalates at {} contaminated, success {})",
            r.n_min,
            r.y_crit,
            report::sig6(r.achieved_success)
        ),
        Recommendation::Blocked { reason } => {
            println!("next period: no recommendation available ({reason})")
        }
    }
}

fn write_out(path: Option<&Path>, body: &str) -> pathwatch::Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, body)?;
            println!("wrote {}", p.display());
        }
        None => print!("{body}"),
    }
    Ok(())
}
