//! Colour-status proportions after one period at the recommended volume,
//! across a grid of true contamination rates.

use pathwatch::simulator::status_sweep;
use pathwatch::simulator::SimulationConfig;
use pathwatch::sizing::{min_sample_size, SizingOptions};
use pathwatch::status::Thresholds;

fn bar(p: f64) -> String {
    "#".repeat((p * 30.0).round() as usize)
}

fn main() -> pathwatch::Result<()> {
    let window = SimulationConfig::default().initial_window()?;
    let thresholds = Thresholds::tuned(&window.belief(), 0.005, 0.95)?;
    let n1 = min_sample_size(&window, &thresholds, &SizingOptions::default())?.n_min;
    println!("one period of {n1} samples, 100 iterations per rate\n");

    let rates: Vec<f64> = (0..=20).map(|i| i as f64 * 0.0025).collect();
    let sweep = status_sweep(&window, &thresholds, n1, &rates, 100, 7)?;

    println!("rate    | green orange red | green bar");
    for cell in &sweep.cells {
        println!(
            "{:>6.2}% | {:>5} {:>6} {:>3} | {}",
            cell.true_rate * 100.0,
            cell.green,
            cell.orange,
            cell.red,
            bar(cell.prop_green)
        );
    }
    println!(
        "\nGreen dominates only at near-zero rates, orange takes over by the \
         0.5% ceiling, and red becomes frequent past ~3%."
    );
    Ok(())
}
