//! One-dimensional maximization: coarse grid scan plus golden-section
//! refinement.

use crate::scalar::{lit, Real};

/// Result of a bounded one-dimensional maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum<T> {
    pub x: T,
    pub value: T,
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`,
/// stopping when the bracket is narrower than `tol`.
pub fn golden_section_max<T: Real>(mut f: impl FnMut(T) -> T, lo: T, hi: T, tol: T) -> Maximum<T> {
    let inv_phi = (lit::<T>(5.0).sqrt() - T::one()) / lit(2.0);
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // 200 iterations shrink any f64 bracket below one ulp.
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = (a + b) / lit(2.0);
    let fm = f(mid);
    // Report the best point actually evaluated.
    [(c, fc), (d, fd), (mid, fm)]
        .into_iter()
        .fold(Maximum { x: mid, value: fm }, |best, (x, v)| {
            if v > best.value {
                Maximum { x, value: v }
            } else {
                best
            }
        })
}

/// Uniform scan of `points` samples on `[lo, hi]`. Returns the index of the
/// earliest sample whose value is within `tie_tol` of the largest sample,
/// along with all sampled values.
pub fn grid_scan<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, points: usize, tie_tol: T) -> (usize, Vec<T>) {
    assert!(points >= 2, "grid scan needs at least two points");
    let step = (hi - lo) / T::from_usize_lossy(points - 1);
    let values: Vec<T> = (0..points).map(|i| f(lo + step * T::from_usize_lossy(i))).collect();
    let best = values.iter().copied().fold(T::neg_infinity(), T::max);
    let idx = values.iter().position(|&v| v >= best - tie_tol).unwrap_or(0);
    (idx, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn parabola() {
        let m = golden_section_max(|x: f64| -(x - 0.3).powi(2) + 2.0, -1.0, 4.0, 1e-12);
        assert_abs_diff_eq!(m.x, 0.3, epsilon = 1e-7);
        assert_abs_diff_eq!(m.value, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn reversed_bracket_and_boundary_maximum() {
        let m = golden_section_max(|x: f64| x, 1.0, 0.0, 1e-10);
        assert!(m.x > 1.0 - 1e-9);
    }

    #[test]
    fn scan_prefers_earliest_tie() {
        let (idx, vals) = grid_scan(|x: f64| (x * std::f64::consts::PI).sin().abs(), 0.0, 4.0, 9, 1e-12);
        assert_eq!(vals.len(), 9);
        // maxima at x = 0.5, 1.5, ...; first grid hit is index 1
        assert_eq!(idx, 1);
    }

    #[test]
    fn works_in_single_precision() {
        let m = golden_section_max(|x: f32| -(x - 1.5) * (x - 1.5), 0.0, 3.0, 1e-5);
        assert!((m.x - 1.5).abs() < 1e-3);
    }
}
