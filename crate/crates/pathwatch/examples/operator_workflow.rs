//! The quarterly operator loop against a persistent state file:
//! initialize from history, recommend, record what the inspectors found,
//! repeat. Uses a temporary directory; point `--state` style paths at a
//! real location in production.

use pathwatch::store::{self, PathwayConfig, Recommendation};

fn show(state: &store::PathwayState) {
    println!(
        "  belief Beta({}, {}), t_change {:.6}, status {}",
        state.cache.belief.alpha, state.cache.belief.beta, state.cache.t_change, state.cache.status
    );
    match &state.cache.recommendation {
        Recommendation::Sized(r) => println!("  next period: at least {} samples", r.n_min),
        Recommendation::Blocked { reason } => println!("  next period: blocked ({reason})"),
    }
}

fn main() -> pathwatch::Result<()> {
    let dir = std::env::temp_dir().join("pathwatch-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("pathway.json");
    let _ = std::fs::remove_file(&path);

    println!("quarter 0: initialize from two historical batches");
    let _lock = store::StateLock::acquire(&path)?;
    let state = store::init(PathwayConfig::default(), &[(5000, 3), (5000, 3)])?;
    store::save(&state, &path)?;
    show(&state);

    // a few quarters of inspection results, as they might come in
    let outcomes = [(757u64, 0u64), (744, 1), (913, 0), (700, 0)];
    let mut state = store::load(&path)?;
    for (i, &(n, y)) in outcomes.iter().enumerate() {
        println!("\nquarter {}: inspected {n}, found {y}", i + 1);
        let (next, outcome) = store::record(&state, n, y)?;
        println!(
            "  posterior Beta({}, {}) against t_change {:.6} -> {}",
            outcome.posterior.alpha,
            outcome.posterior.beta,
            outcome.t_change_in_force,
            outcome.status
        );
        store::save(&next, &path)?;
        state = next;
        show(&state);
    }

    println!("\nreplay audit: rebuilding from the event history...");
    store::verify_integrity(&state)?;
    println!("  stored state matches its full replay");

    println!("\nstate file lives at {}", path.display());
    Ok(())
}
