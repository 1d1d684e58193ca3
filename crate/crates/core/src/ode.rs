//! Dormand–Prince 5(4) with PI step control. Steps are shortened to land
//! exactly on every requested sample time, so no interpolation error enters
//! the output.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Steps shorter than this abort the integration.
pub const MIN_STEP: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveConfig<T> {
    /// Local error tolerance: absolute for components below one in
    /// magnitude, relative above.
    pub tol: T,
    pub initial_step: T,
    pub max_step: T,
}

// Butcher tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights equal the last row of A (FSAL); E = b5 - b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Integrates `y' = f(t, y)` from `t0` and returns the state at each of the
/// non-decreasing `samples` (all ≥ `t0`).
pub fn integrate_sampled<T, F>(mut f: F, t0: T, y0: &[T], samples: &[T], cfg: &AdaptiveConfig<T>) -> Result<Vec<Vec<T>>>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
{
    let n = y0.len();
    let mut out = Vec::with_capacity(samples.len());
    if samples.windows(2).any(|w| w[1] < w[0]) || samples[0] < t0 {
        return Err(Error::Domain(
            "sample times must be sorted and start at or after t0".into(),
        ));
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<T>> = vec![vec![T::zero(); n]; 7];
    let mut stage = vec![T::zero(); n];
    let mut y_new = vec![T::zero(); n];
    f(t, &y, &mut k[0]);

    let mut next = 0;
    while next < samples.len() && samples[next] <= t {
        out.push(y.clone());
        next += 1;
    }

    let tol = cfg.tol;
    let mut h = cfg.initial_step.min(cfg.max_step);
    let mut fac_old: T = lit(1e-4);
    let mut rejected_last = false;

    while next < samples.len() {
        if h < lit(MIN_STEP) {
            return Err(Error::StepUnderflow {
                tau: t.to_f64_lossy(),
                dt: h.to_f64_lossy(),
            });
        }
        let target = samples[next];
        let last = t + h >= target;
        let step = if last { target - t } else { h };

        for s in 1..7 {
            for i in 0..n {
                let mut acc = T::zero();
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc = acc + lit::<T>(A[s][j]) * kj[i];
                }
                stage[i] = y[i] + step * acc;
            }
            let (_, rest) = k.split_at_mut(s);
            f(t + lit::<T>(C[s]) * step, &stage, &mut rest[0]);
        }
        // Row 6 of A is the fifth-order solution, so k[6] = f(t + h, y_new).
        y_new.copy_from_slice(&stage);
        let k7 = k[6].clone();

        let mut err = T::zero();
        for i in 0..n {
            let mut e = lit::<T>(E[6]) * k7[i];
            for (j, kj) in k.iter().enumerate().take(6) {
                e = e + lit::<T>(E[j]) * kj[i];
            }
            let scale = tol * T::one().max(y[i].abs()).max(y_new[i].abs());
            err = err.max((step * e).abs() / scale);
        }
        if !err.is_finite() {
            return Err(Error::IntegrationFailure {
                tau: t.to_f64_lossy(),
                reason: "non-finite error estimate".into(),
            });
        }

        let expo = lit::<T>(0.2 - BETA * 0.75);
        let fac11 = err.max(lit(1e-300)).powf(expo);
        if err <= T::one() {
            t = if last { target } else { t + step };
            while next < samples.len() && samples[next] <= t {
                out.push(y_new.clone());
                next += 1;
            }
            y.copy_from_slice(&y_new);
            k[0] = k7;
            let mut fac = fac11 / fac_old.powf(lit(BETA));
            fac = (fac / lit(SAFETY)).max(lit(1.0 / FAC_MAX)).min(lit(1.0 / FAC_MIN));
            let mut h_new = step / fac;
            if rejected_last {
                h_new = h_new.min(step);
            }
            if last {
                // A step cut short by a sample says nothing against the
                // step size the controller was proposing.
                h_new = h_new.max(h);
            }
            fac_old = err.max(lit(1e-4));
            h = h_new.min(cfg.max_step);
            rejected_last = false;
        } else {
            h = step / (fac11 / lit(SAFETY)).min(lit(1.0 / FAC_MIN));
            rejected_last = true;
        }
    }
    Ok(out)
}
