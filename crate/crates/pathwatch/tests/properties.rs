//! Property tests for the structural invariants: conjugacy under data
//! splits, CDF/quantile consistency, window bookkeeping, and
//! classification monotonicity.

use pathwatch::belief::{
    beta_cdf, beta_quantile, jeffreys_prior, posterior_update, BetaParams, EvidenceWindow,
    InspectionBatch,
};
use pathwatch::status::{classify, ColourStatus, Thresholds};
use proptest::prelude::*;

fn batch_strategy() -> impl Strategy<Value = (u64, u64)> {
    (0u64..5000).prop_flat_map(|n| (Just(n), 0..=n.min(60)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Updating in one step equals updating through any ordered partition.
    #[test]
    fn conjugacy_over_partitions(batches in prop::collection::vec(batch_strategy(), 1..6)) {
        let total_n: u64 = batches.iter().map(|b| b.0).sum();
        let total_y: u64 = batches.iter().map(|b| b.1).sum();
        let single = posterior_update(
            jeffreys_prior(),
            &InspectionBatch::new(1, total_n, total_y).unwrap(),
        ).unwrap();
        let mut chained = jeffreys_prior();
        for (i, &(n, y)) in batches.iter().enumerate() {
            chained = posterior_update(chained, &InspectionBatch::new(i as u64, n, y).unwrap()).unwrap();
        }
        prop_assert_eq!(single, chained);
    }

    /// alpha + beta = 1 + total samples after any update chain.
    #[test]
    fn mass_accounting(batches in prop::collection::vec(batch_strategy(), 1..6)) {
        let mut belief = jeffreys_prior();
        let mut total = 0u64;
        for (i, &(n, y)) in batches.iter().enumerate() {
            belief = posterior_update(belief, &InspectionBatch::new(i as u64, n, y).unwrap()).unwrap();
            total += n;
        }
        prop_assert!((belief.alpha + belief.beta - (1.0 + total as f64)).abs() < 1e-9);
    }

    /// CDF is monotone and the quantile inverts it within 1e-9.
    #[test]
    fn cdf_quantile_round_trip(
        alpha in 0.5f64..10_000.0,
        beta in 0.5f64..10_000.0,
        q in 0.01f64..0.99,
    ) {
        let p = BetaParams::new(alpha, beta).unwrap();
        let x = beta_quantile(q, &p).unwrap();
        let back = beta_cdf(x, &p).unwrap();
        prop_assert!((back - q).abs() < 1e-9, "q={}, back={}", q, back);
        prop_assert!(back >= q, "quantile must not undershoot its level");
    }

    /// Classification severity never decreases as contamination grows.
    #[test]
    fn classification_monotone_in_contamination(
        n in 100u64..2000,
        step in 1u64..10,
    ) {
        let prior = BetaParams::new(6.5, 9994.5).unwrap();
        let th = Thresholds::tuned(&prior, 0.005, 0.95).unwrap();
        let mut last = ColourStatus::Green;
        let mut y = 0;
        while y <= n.min(80) {
            let post = posterior_update(prior, &InspectionBatch::new(9, n, y).unwrap()).unwrap();
            let s = classify(&post, &th);
            prop_assert!(s >= last);
            last = s;
            y += step;
        }
    }

    /// Classification depends only on aggregate evidence, not batch order.
    #[test]
    fn classification_invariant_to_batch_order(
        mut batches in prop::collection::vec(batch_strategy(), 2..5),
    ) {
        let th = Thresholds::new(0.01, 0.002, 0.95).unwrap();
        let classify_in_order = |bs: &[(u64, u64)]| {
            let mut belief = jeffreys_prior();
            for (i, &(n, y)) in bs.iter().enumerate() {
                belief = posterior_update(belief, &InspectionBatch::new(i as u64, n, y).unwrap()).unwrap();
            }
            classify(&belief, &th)
        };
        let forward = classify_in_order(&batches);
        batches.reverse();
        let backward = classify_in_order(&batches);
        prop_assert_eq!(forward, backward);
    }

    /// Window aggregates always equal the sum of retained batches, and the
    /// retained count never exceeds the window length.
    #[test]
    fn window_bookkeeping(
        batches in prop::collection::vec(batch_strategy(), 1..12),
        window_len in 1usize..5,
    ) {
        let mut w = EvidenceWindow::new(vec![], window_len).unwrap();
        for (i, &(n, y)) in batches.iter().enumerate() {
            w = w.roll(InspectionBatch::new(i as u64 + 1, n, y).unwrap()).unwrap();
            prop_assert!(w.batches().len() <= window_len);
            let (total_n, total_y) = w.aggregate();
            let expect_n: u64 = w.batches().iter().map(|b| b.n_inspected).sum();
            let expect_y: u64 = w.batches().iter().map(|b| b.n_contaminated).sum();
            prop_assert_eq!((total_n, total_y), (expect_n, expect_y));
        }
    }
}
