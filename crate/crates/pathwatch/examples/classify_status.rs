//! Traffic-light classification of the leakage-rate belief.
//!
//! Green: confidently below the change threshold. Orange: confidently
//! below the risk ceiling only. Red: neither.

use pathwatch::belief::{beta_cdf, posterior_update, InspectionBatch};
use pathwatch::status::{classify, Thresholds};
use pathwatch::BetaParams;

fn main() -> pathwatch::Result<()> {
    let prior = BetaParams::new(6.5, 9994.5)?;
    let thresholds = Thresholds::tuned(&prior, 0.005, 0.95)?;
    println!(
        "thresholds: t_change = {:.6}, t_risk = {:.6}, level = {}",
        thresholds.t_change, thresholds.t_risk, thresholds.credible_level
    );
    println!("prior classifies as: {}\n", classify(&prior, &thresholds));

    // How the next quarter's outcome moves the status, assuming the
    // recommended 757 samples are taken.
    println!("detections | P(r < t_change) | P(r < t_risk) | status");
    for y in [0u64, 1, 2, 5, 10, 20, 40] {
        let posterior = posterior_update(prior, &InspectionBatch::new(3, 757, y)?)?;
        let p_change = beta_cdf(thresholds.t_change, &posterior)?;
        let p_risk = beta_cdf(thresholds.t_risk, &posterior)?;
        println!(
            "{y:>10} | {p_change:>15.6} | {p_risk:>13.6} | {}",
            classify(&posterior, &thresholds)
        );
    }

    println!("\nA belief with no data is nowhere near confident enough:");
    let jeffreys = pathwatch::belief::jeffreys_prior();
    let tight = Thresholds::new(0.005, 0.001, 0.95)?;
    println!(
        "Beta(0.5, 0.5) has P(r < 0.005) = {:.4} -> {}",
        beta_cdf(0.005, &jeffreys)?,
        classify(&jeffreys, &tight)
    );
    Ok(())
}
