//! Integer search shared by the sizing solver and the power comparator.

/// Finds the smallest n in [1, cap] satisfying `pred`, assuming `pred`
/// is eventually true and roughly monotone: exponential doubling to
/// bracket, binary search, then a bounded downward scan to resolve the
/// discreteness sawtooth near the boundary.
///
/// Returns `None` when no n up to `cap` satisfies the predicate.
pub(crate) fn smallest_satisfying<F: FnMut(u64) -> bool>(
    mut pred: F,
    cap: u64,
    scan: u64,
) -> Option<u64> {
    debug_assert!(cap >= 1);
    if pred(1) {
        return Some(1);
    }
    // double until the predicate holds
    let mut lo = 1u64; // pred(lo) is false
    let mut hi = 2u64;
    loop {
        if hi >= cap {
            hi = cap;
            if !pred(hi) {
                return None;
            }
            break;
        }
        if pred(hi) {
            break;
        }
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    // invariant: pred(lo) false, pred(hi) true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // downward scan: the sawtooth can leave smaller satisfying n just below
    let mut best = hi;
    for _ in 0..scan {
        if best == 1 || !pred(best - 1) {
            break;
        }
        best -= 1;
    }
    Some(best)
}
