//! Monotone bisection with a certified bracket.

/// Root of an increasing function on `[lo, hi]` with `f(lo) <= 0 <= f(hi)`,
/// bisected until the bracket is narrower than `tol`. Returns the bracket
/// midpoint.
pub fn bisect_increasing<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    debug_assert!(lo < hi);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
