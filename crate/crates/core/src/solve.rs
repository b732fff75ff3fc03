//! Shared scalar root finding.
//!
//! Every delay threshold in this crate reduces to a sign change of a
//! continuous scalar function, so a single bisection routine backs them all.
//! The iteration count is fixed rather than tolerance-driven: identical inputs
//! then take identical paths on every platform, which keeps CSV/JSON output
//! byte-stable and lets tests compare results bitwise.

/// Bisect `f` over `[lo, hi]`, which must bracket a sign change.
///
/// Runs a fixed 200 halvings (stopping early only when the bracket collapses
/// to adjacent floats), so the returned midpoint is accurate to f64
/// resolution for any practically sized bracket.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    debug_assert!(lo < hi, "bisect needs a non-empty bracket");
    let rising = f(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Evenly spaced grid of `count` points covering `[lo, hi]` inclusive.
///
/// `count` must be at least 2; both endpoints are hit exactly.
pub(crate) fn linspace(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    debug_assert!(count >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(move |i| {
        if i + 1 == count {
            hi
        } else {
            lo + step * i as f64
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let root = bisect(0.0, 2.0, |x| x * x - 2.0);
        assert!((root - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn bisect_handles_decreasing_functions() {
        let root = bisect(0.0, 2.0, |x| 2.0 - x * x);
        assert!((root - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn bisect_is_deterministic() {
        let f = |x: f64| x.exp() - 3.0;
        assert_eq!(bisect(0.0, 2.0, f).to_bits(), bisect(0.0, 2.0, f).to_bits());
    }

    #[test]
    fn linspace_hits_endpoints_exactly() {
        let pts: Vec<f64> = linspace(0.1, 0.9, 5).collect();
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0], 0.1);
        assert_eq!(pts[4], 0.9);
        assert!((pts[2] - 0.5).abs() < 1e-15);
    }
}
