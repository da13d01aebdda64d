//! Minimum sample size for the next reporting period.
//!
//! Starting from two past quarters of inspection data, tune the change
//! threshold, then solve for the smallest next-period sample size whose
//! weighted escalation probability reaches 95%.

use pathwatch::belief::{EvidenceWindow, InspectionBatch, TailMode};
use pathwatch::sizing::{min_sample_size, weighted_success_prob, SizingOptions};
use pathwatch::status::Thresholds;

fn main() -> pathwatch::Result<()> {
    // Past data: 5000 samples with 3 detections in each of the last two
    // quarters, so 6 detections in 10,000 samples overall.
    let window = EvidenceWindow::new(
        vec![
            InspectionBatch::new(1, 5000, 3)?,
            InspectionBatch::new(2, 5000, 3)?,
        ],
        2,
    )?;
    let prior = window.belief();
    println!("prior belief: Beta({}, {})", prior.alpha, prior.beta);
    println!("prior mean leakage rate: {:.6}", prior.mean());

    // The risk ceiling is a policy choice; the change threshold is tuned
    // so the prior sits exactly at the green boundary.
    let thresholds = Thresholds::tuned(&prior, 0.005, 0.95)?;
    println!("risk ceiling t_risk:   {:.6}", thresholds.t_risk);
    println!("tuned t_change:        {:.6}", thresholds.t_change);

    for mode in [TailMode::Normal, TailMode::Exact] {
        let opts = SizingOptions {
            mode,
            ..Default::default()
        };
        let result = min_sample_size(&window, &thresholds, &opts)?;
        println!(
            "\n{mode} mode: sample at least {} items next period",
            result.n_min
        );
        println!(
            "  escalates out of green at {} contaminated items",
            result.y_crit
        );
        println!(
            "  weighted escalation probability: {:.4}",
            result.achieved_success
        );
        let below = weighted_success_prob(result.n_min - 1, &prior, &thresholds, mode)?;
        println!("  one sample fewer would achieve:  {below:.4}");
    }
    Ok(())
}
