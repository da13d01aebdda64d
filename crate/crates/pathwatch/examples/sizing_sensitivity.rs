//! How the recommended volume responds to each input: the risk ceiling,
//! past detections, the credible level, and the prior sample size.

use pathwatch::simulator::{sizing_sweep, SweepAxis, SweepBase};

fn print_points(result: &pathwatch::simulator::SizingSweepResult) {
    for p in &result.points {
        match (&p.n_min, &p.error) {
            (Some(n), _) => println!("  {} = {:>10} -> n_min {n}", result.axis, p.value),
            (None, Some(e)) => println!("  {} = {:>10} -> {e}", result.axis, p.value),
            _ => {}
        }
    }
}

fn main() {
    let base = SweepBase::default();

    println!("risk ceiling (higher ceiling, less sampling):");
    let sweep = sizing_sweep(SweepAxis::TRisk, &[0.003, 0.005, 0.0075, 0.01, 0.02], &base);
    print_points(&sweep);

    println!("\npast detections in 10,000 samples (more detections, more sampling):");
    let grid: Vec<f64> = (0..=6).map(f64::from).collect();
    let sweep = sizing_sweep(SweepAxis::Y0, &grid, &base);
    print_points(&sweep);

    println!("\ncredible level (tighter assurance, more sampling):");
    let sweep = sizing_sweep(SweepAxis::CredibleLevel, &[0.94, 0.95, 0.96], &base);
    print_points(&sweep);

    println!("\nprior sample size at zero past detections, 1% ceiling:");
    let base_zero = SweepBase {
        y0: 0,
        t_risk: 0.01,
        ..base
    };
    let grid = [500.0, 1000.0, 2000.0, 5000.0, 10000.0, 20000.0, 50000.0];
    let sweep = sizing_sweep(SweepAxis::N0, &grid, &base_zero);
    print_points(&sweep);
    println!(
        "  (tiny priors are punished; past a few thousand samples the\n   \
         recommendation barely moves)"
    );
}
