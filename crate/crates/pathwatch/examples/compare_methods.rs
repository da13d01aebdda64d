//! The three sizing policies side by side: fixed detection-level design,
//! the adaptive two-threshold method, and the power-analysis surrogate.

use pathwatch::belief::{EvidenceWindow, InspectionBatch, TailMode};
use pathwatch::comparators::{fixed_detection_size, power_analysis_size, FixedDesign, PowerDesign};
use pathwatch::sizing::{min_sample_size, SizingOptions};
use pathwatch::status::Thresholds;

fn window(n: u64, y: u64) -> pathwatch::Result<EvidenceWindow> {
    EvidenceWindow::new(vec![InspectionBatch::new(1, n, y)?], 2)
}

fn main() -> pathwatch::Result<()> {
    let fixed = fixed_detection_size(&FixedDesign::default())?;
    println!("fixed design detecting 0.5% with 95% confidence: {fixed} samples\n");

    println!("past data        | adaptive | power analysis");
    for (n0, y0, label) in [
        (10_000u64, 6u64, "routine history   "),
        (10_000, 1, "very low risk     "),
        (10_000, 0, "spotless history  "),
        (10_000, 20, "rate near ceiling "),
    ] {
        let w = window(n0, y0)?;
        let adaptive = Thresholds::tuned(&w.belief(), 0.005, 0.95)
            .and_then(|th| min_sample_size(&w, &th, &SizingOptions::default()))
            .map(|r| r.n_min.to_string())
            .unwrap_or_else(|e| format!("({e})"));
        let power = power_analysis_size(&w, &PowerDesign::new(0.005), TailMode::Exact)
            .map(|n| n.to_string())
            .unwrap_or_else(|e| format!("({e})"));
        println!("{label} ({n0:>6}, {y0:>2}) | {adaptive:>8} | {power}");
    }

    println!(
        "\nThe surrogate blows up as the estimated rate nears the cutoff, and \
         refuses outright once the estimate crosses it:"
    );
    for y0 in [30u64, 45, 55] {
        let w = window(10_000, y0)?;
        let outcome = power_analysis_size(
            &w,
            &PowerDesign {
                n_cap: 200_000,
                ..PowerDesign::new(0.005)
            },
            TailMode::Exact,
        );
        println!("  y0 = {y0}: {:?}", outcome.map_err(|e| e.to_string()));
    }
    Ok(())
}
