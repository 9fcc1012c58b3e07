//! Derivative-free scalar maximization.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Number of equally spaced points probed before the golden-section stage.
pub const SCAN_POINTS: usize = 64;

/// Maximizes `f` on `[lo, hi]`: a coarse scan picks the best cell, then
/// golden-section search narrows that cell to `rel_tol·(hi − lo)`.
/// Returns the best point seen and its value.
pub fn maximize<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut best = (lo, f(lo));
    let mut best_i = 0;
    for i in 1..SCAN_POINTS {
        let x = if i + 1 == SCAN_POINTS { hi } else { lo + step * i as f64 };
        let v = f(x);
        if v > best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_i + 1) as f64).min(hi);
    let tol = rel_tol * (hi - lo);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Best point of `f` on the grid `lo, lo + step, …, hi` (the upper end is
/// always included).
pub fn grid_maximize<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let n = ((hi - lo) / step).floor() as usize;
    let mut best = (lo, f(lo));
    for i in 1..=n + 1 {
        let x = if i > n { hi } else { lo + step * i as f64 };
        if i > n && (x - (lo + step * n as f64)).abs() < 1e-12 {
            break;
        }
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_peak() {
        let (x, v) = maximize(|x| -(x - 0.3137f64).powi(2), 0.0, 1.0, 1e-6);
        assert!((x - 0.3137).abs() < 1e-5);
        assert!(v <= 0.0);
    }

    #[test]
    fn grid_includes_upper_end() {
        let (x, _) = grid_maximize(|x| x, 0.0, 10.5, 1.0);
        assert_eq!(x, 10.5);
        let (x, _) = grid_maximize(|x| -x, 2.0, 10.0, 1.0);
        assert_eq!(x, 2.0);
    }
}
