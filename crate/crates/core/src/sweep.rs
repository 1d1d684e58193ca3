//! Parameter sweeps over (ξ, τ) and over ξ alone.
//!
//! Work is split into one item per ξ value. Items run on a rayon pool whose
//! size only changes wall time: every item is computed by the same code
//! path regardless of which thread runs it, and results are collected in
//! grid order.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, OptimumRecord};
use crate::error::{Error, Result};
use crate::lindblad::{self, LindbladConfig};
use crate::model::{pure_to_density, ModelParams, RescaledTime, E0, G0, G1};
use crate::multimode;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Row-level check on p_e0 + p_g1 + p_g0.
pub const POPULATION_SUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

impl Spacing {
    pub fn as_str(self) -> &'static str {
        match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Lindblad,
    Multimode,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Lindblad => "lindblad",
            Method::Multimode => "multimode",
        }
    }
}

/// `steps` values from `min` to `max` inclusive. Endpoints are exact.
pub fn spaced(min: f64, max: f64, steps: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::Domain("need at least one grid value".into()));
    }
    if !min.is_finite() || !max.is_finite() || min > max || (steps > 1 && min == max) {
        return Err(Error::Domain(format!(
            "invalid range [{min}, {max}] for {steps} values"
        )));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let last = (steps - 1) as f64;
    let values = match spacing {
        Spacing::Linear => (0..steps)
            .map(|k| {
                if k + 1 == steps {
                    max
                } else {
                    min + (max - min) * k as f64 / last
                }
            })
            .collect(),
        Spacing::Log => {
            if !(min > 0.0) {
                return Err(Error::Domain(format!(
                    "log spacing needs a positive minimum, got {min}"
                )));
            }
            let (a, b) = (min.ln(), max.ln());
            (0..steps)
                .map(|k| match k {
                    0 => min,
                    _ if k + 1 == steps => max,
                    _ => (a + (b - a) * k as f64 / last).exp(),
                })
                .collect()
        }
    };
    Ok(values)
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub xi_values: Vec<f64>,
    pub tau_values: Vec<f64>,
    /// Declared spacing of `xi_values`, recorded in metadata.
    pub xi_spacing: Spacing,
    pub method: Method,
}

impl SweepGrid {
    pub fn new(xi_values: Vec<f64>, tau_values: Vec<f64>, xi_spacing: Spacing, method: Method) -> Result<Self> {
        if xi_values.is_empty() || tau_values.is_empty() {
            return Err(Error::Domain("grid axes must be non-empty".into()));
        }
        if !strictly_increasing(&xi_values) || !strictly_increasing(&tau_values) {
            return Err(Error::Domain("grid axes must be strictly increasing".into()));
        }
        if !(xi_values[0] > 0.0) || !xi_values.iter().all(|x| x.is_finite()) {
            return Err(Error::Domain("xi values must be positive and finite".into()));
        }
        if !(tau_values[0] >= 0.0) || !tau_values.iter().all(|x| x.is_finite()) {
            return Err(Error::Domain("tau values must be non-negative and finite".into()));
        }
        Ok(Self {
            xi_values,
            tau_values,
            xi_spacing,
            method,
        })
    }

    /// The default heatmap grid: 81 log-spaced ξ in [0.01, 10] by 301
    /// linear τ in [0, 3].
    pub fn default_heatmap(method: Method) -> Self {
        Self::new(
            spaced(0.01, 10.0, 81, Spacing::Log).expect("static range"),
            spaced(0.0, 3.0, 301, Spacing::Linear).expect("static range"),
            Spacing::Log,
            method,
        )
        .expect("static grid")
    }
}

/// Knobs for the numerical methods and the worker pool.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    pub lindblad_tol: f64,
    pub lindblad_dt: f64,
    pub multimode_modes: usize,
    /// Band half-width in units of κ.
    pub multimode_window: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            threads: None,
            lindblad_tol: lindblad::DEFAULT_TOL,
            lindblad_dt: lindblad::DEFAULT_DT,
            multimode_modes: multimode::DEFAULT_MODES,
            multimode_window: multimode::DEFAULT_WINDOW,
        }
    }
}

impl SweepOptions {
    /// Runs `job` on a pool of the configured size.
    pub fn install<R: Send>(&self, job: impl FnOnce() -> R + Send) -> Result<R> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(Error::Domain("thread count must be at least 1".into()));
            }
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::Domain(format!("cannot build worker pool: {e}")))?;
        Ok(pool.install(job))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub xi: f64,
    pub tau: f64,
    pub concurrence: f64,
    pub p_e0: f64,
    pub p_g1: f64,
    pub p_g0: f64,
    pub survival: f64,
}

impl SweepRow {
    pub const COLUMNS: [&'static str; 7] = ["xi", "tau", "concurrence", "p_e0", "p_g1", "p_g0", "survival"];

    pub fn values(&self) -> [f64; 7] {
        [
            self.xi,
            self.tau,
            self.concurrence,
            self.p_e0,
            self.p_g1,
            self.p_g0,
            self.survival,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub method: Method,
    pub xi_spacing: Spacing,
    pub xi_count: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    pub tau_count: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    pub lindblad_tol: Option<f64>,
    pub multimode_modes: Option<usize>,
    pub multimode_window: Option<f64>,
    /// Recurrence horizon of the discrete bath, when one is used.
    pub recurrence_horizon: Option<f64>,
    pub version: &'static str,
    /// Excluded from any determinism comparison.
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// ξ-major, then τ.
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

fn annotate(xi: f64, fallback_tau: f64, e: Error) -> Error {
    let tau = match &e {
        Error::IntegrationFailure { tau, .. } | Error::StepUnderflow { tau, .. } => *tau,
        _ => fallback_tau,
    };
    Error::GridPoint {
        xi,
        tau,
        source: Box::new(e),
    }
}

fn check_row(row: SweepRow) -> Result<SweepRow> {
    let sum = row.p_e0 + row.p_g1 + row.p_g0;
    if (sum - 1.0).abs() > POPULATION_SUM_TOL {
        return Err(Error::GridPoint {
            xi: row.xi,
            tau: row.tau,
            source: Box::new(Error::Invariant(format!("populations sum to {sum}"))),
        });
    }
    Ok(row)
}

/// Rows for one ξ and every τ of the grid.
pub fn evaluate_row(xi: f64, taus: &[f64], method: Method, opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    let first_tau = taus.first().copied().unwrap_or(0.0);
    let params = ModelParams::new(xi).map_err(|e| annotate(xi, first_tau, e))?;
    let t_end = taus.last().copied().unwrap_or(0.0);
    let horizon = RescaledTime::new(t_end).map_err(|e| annotate(xi, t_end, e))?;
    let rows: Vec<SweepRow> = match method {
        Method::Analytic => taus
            .iter()
            .map(|&tau| {
                let t = RescaledTime::new(tau).map_err(|e| annotate(xi, tau, e))?;
                let psi = analytic::amplitudes(&params, t);
                let rho = pure_to_density(&psi).map_err(|e| annotate(xi, tau, e))?;
                Ok(SweepRow {
                    xi,
                    tau,
                    concurrence: analytic::concurrence(&params, t),
                    p_e0: rho.population(E0),
                    p_g1: rho.population(G1),
                    p_g0: rho.population(G0),
                    survival: psi.norm_sqr(),
                })
            })
            .collect::<Result<_>>()?,
        Method::Lindblad => {
            let mut cfg = LindbladConfig::new(params, horizon);
            cfg.tol = opts.lindblad_tol;
            cfg.dt = opts.lindblad_dt;
            let states = lindblad::integrate(&cfg, taus).map_err(|e| annotate(xi, first_tau, e))?;
            states
                .iter()
                .zip(taus)
                .map(|(rho, &tau)| SweepRow {
                    xi,
                    tau,
                    concurrence: lindblad::block_concurrence(rho),
                    p_e0: rho.population(E0),
                    p_g1: rho.population(G1),
                    p_g0: rho.population(G0),
                    survival: rho.population(E0) + rho.population(G1),
                })
                .collect()
        }
        Method::Multimode => {
            let bath = multimode::sample_bath(&params, opts.multimode_modes, opts.multimode_window)
                .map_err(|e| annotate(xi, first_tau, e))?;
            let states =
                multimode::evolve(&bath, horizon, bath.max_step(), taus).map_err(|e| annotate(xi, first_tau, e))?;
            states
                .iter()
                .zip(taus)
                .map(|(s, &tau)| {
                    let p_e0 = s.excited_population();
                    let p_g1 = s.pseudomode_amplitude(&bath).norm_sqr();
                    SweepRow {
                        xi,
                        tau,
                        concurrence: multimode::extractable_concurrence(s, &bath),
                        p_e0,
                        p_g1,
                        // excitation spread over the rest of the bath
                        p_g0: 1.0 - p_e0 - p_g1,
                        survival: p_e0 + p_g1,
                    }
                })
                .collect()
        }
    };
    rows.into_iter().map(check_row).collect()
}

/// Evaluates the grid's method at every (ξ, τ).
pub fn heatmap(grid: &SweepGrid, opts: &SweepOptions) -> Result<SweepResult> {
    let start = Instant::now();
    let per_xi: Vec<Vec<SweepRow>> = opts.install(|| {
        grid.xi_values
            .par_iter()
            .map(|&xi| evaluate_row(xi, &grid.tau_values, grid.method, opts))
            .collect::<Result<Vec<_>>>()
    })??;
    let rows: Vec<SweepRow> = per_xi.into_iter().flatten().collect();
    debug_assert_eq!(rows.len(), grid.xi_values.len() * grid.tau_values.len());

    let numeric_tol = matches!(grid.method, Method::Lindblad).then_some(opts.lindblad_tol);
    let multimode = matches!(grid.method, Method::Multimode);
    let horizon = if multimode {
        let p = ModelParams::new(grid.xi_values[0])?;
        Some(multimode::sample_bath(&p, opts.multimode_modes, opts.multimode_window)?.recurrence_horizon())
    } else {
        None
    };
    let metadata = SweepMetadata {
        method: grid.method,
        xi_spacing: grid.xi_spacing,
        xi_count: grid.xi_values.len(),
        xi_min: grid.xi_values[0],
        xi_max: *grid.xi_values.last().expect("non-empty"),
        tau_count: grid.tau_values.len(),
        tau_min: grid.tau_values[0],
        tau_max: *grid.tau_values.last().expect("non-empty"),
        lindblad_tol: numeric_tol,
        multimode_modes: multimode.then_some(opts.multimode_modes),
        multimode_window: multimode.then_some(opts.multimode_window),
        recurrence_horizon: horizon,
        version: VERSION,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(SweepResult { rows, metadata })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmaxRow {
    pub record: OptimumRecord<f64>,
    /// dC_max/dξ by central difference.
    pub derivative: f64,
}

impl CmaxRow {
    pub const COLUMNS: [&'static str; 5] = ["xi", "tau_opt", "c_max", "dcmax_dxi", "source"];
}

/// A point where C_max fell below its predecessor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityViolation {
    pub index: usize,
    pub xi: f64,
    pub c_max: f64,
    pub previous: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmaxCurve {
    pub rows: Vec<CmaxRow>,
    /// Reported as found, never corrected.
    pub violations: Vec<MonotonicityViolation>,
}

impl CmaxCurve {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Default curve: 200 log-spaced ξ in [0.01, 100].
pub fn default_cmax_grid() -> Vec<f64> {
    spaced(0.01, 100.0, 200, Spacing::Log).expect("static range")
}

pub fn cmax_curve(xi_values: &[f64], opts: &SweepOptions) -> Result<CmaxCurve> {
    if xi_values.is_empty() || !strictly_increasing(xi_values) || !(xi_values[0] > 0.0) {
        return Err(Error::Domain(
            "xi values must be positive and strictly increasing".into(),
        ));
    }
    let rows: Vec<CmaxRow> = opts.install(|| {
        xi_values
            .par_iter()
            .map(|&xi| {
                let wrap = |e| annotate(xi, f64::NAN, e);
                let record = analytic::c_max(&ModelParams::new(xi).map_err(wrap)?).map_err(wrap)?;
                let h = analytic::default_derivative_step(xi).min(xi / 2.0);
                let derivative = analytic::c_max_derivative(xi, h).map_err(wrap)?;
                Ok(CmaxRow { record, derivative })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.record.xi, r.record.c_max)).collect();
    let violations = monotonicity_violations(&points);
    Ok(CmaxCurve { rows, violations })
}

/// Every (ξ, C_max) point lower than the one before it.
pub fn monotonicity_violations(points: &[(f64, f64)]) -> Vec<MonotonicityViolation> {
    points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1].1 < w[0].1)
        .map(|(i, w)| MonotonicityViolation {
            index: i + 1,
            xi: w[1].0,
            c_max: w[1].1,
            previous: w[0].1,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(threads: usize) -> SweepOptions {
        SweepOptions {
            threads: Some(threads),
            ..SweepOptions::default()
        }
    }

    #[test]
    fn spacing_endpoints_and_order() {
        let v = spaced(0.01, 100.0, 200, Spacing::Log).unwrap();
        assert_eq!(v.len(), 200);
        assert_eq!((v[0], v[199]), (0.01, 100.0));
        assert!(strictly_increasing(&v));
        let l = spaced(0.0, 3.0, 301, Spacing::Linear).unwrap();
        assert!((l[50] - 0.5).abs() < 1e-15);
        assert!(spaced(0.0, 1.0, 5, Spacing::Log).is_err());
        assert!(spaced(1.0, 1.0, 5, Spacing::Linear).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(SweepGrid::new(vec![1.0, 0.5], vec![0.0], Spacing::Linear, Method::Analytic).is_err());
        assert!(SweepGrid::new(vec![0.0, 0.5], vec![0.0], Spacing::Linear, Method::Analytic).is_err());
        assert!(SweepGrid::new(vec![0.5], vec![-1.0], Spacing::Linear, Method::Analytic).is_err());
    }

    #[test]
    fn rows_are_xi_major_and_complete() {
        let grid = SweepGrid::new(
            vec![0.5, 1.0, 2.0],
            vec![0.0, 0.5, 1.0, 1.5],
            Spacing::Linear,
            Method::Analytic,
        )
        .unwrap();
        let r = heatmap(&grid, &opts(2)).unwrap();
        assert_eq!(r.rows.len(), 12);
        assert_eq!((r.rows[0].xi, r.rows[0].tau), (0.5, 0.0));
        assert_eq!((r.rows[5].xi, r.rows[5].tau), (1.0, 0.5));
        let golden = r.rows.iter().find(|w| w.xi == 2.0 && w.tau == 0.5).unwrap();
        assert!((golden.concurrence - 0.7039095569054789).abs() < 1e-12);
    }

    #[test]
    fn thread_count_does_not_change_rows() {
        let grid = SweepGrid::new(
            spaced(0.1, 10.0, 9, Spacing::Log).unwrap(),
            spaced(0.0, 2.0, 21, Spacing::Linear).unwrap(),
            Spacing::Log,
            Method::Lindblad,
        )
        .unwrap();
        let a = heatmap(&grid, &opts(1)).unwrap();
        let b = heatmap(&grid, &opts(4)).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn lindblad_rows_match_analytic() {
        let grid = |m| {
            SweepGrid::new(
                spaced(0.1, 10.0, 7, Spacing::Log).unwrap(),
                spaced(0.0, 6.0, 41, Spacing::Linear).unwrap(),
                Spacing::Log,
                m,
            )
            .unwrap()
        };
        let a = heatmap(&grid(Method::Analytic), &opts(2)).unwrap();
        let l = heatmap(&grid(Method::Lindblad), &opts(2)).unwrap();
        for (x, y) in a.rows.iter().zip(&l.rows) {
            assert!((x.concurrence - y.concurrence).abs() < 1e-6);
            assert!((x.p_e0 - y.p_e0).abs() < 1e-6);
            assert!((x.p_g0 - y.p_g0).abs() < 1e-6);
        }
    }

    #[test]
    fn multimode_rows_track_analytic() {
        let mut o = opts(2);
        o.multimode_modes = 1001;
        let grid = SweepGrid::new(
            vec![2.0],
            spaced(0.0, 2.0, 21, Spacing::Linear).unwrap(),
            Spacing::Linear,
            Method::Multimode,
        )
        .unwrap();
        let m = heatmap(&grid, &o).unwrap();
        assert!(m.metadata.recurrence_horizon.unwrap() > 2.0);
        let p = ModelParams::new(2.0).unwrap();
        for row in &m.rows {
            let c = analytic::concurrence(&p, RescaledTime::new(row.tau).unwrap());
            assert!((row.concurrence - c).abs() < 2e-2);
        }
    }

    #[test]
    fn weak_coupling_row_stays_near_zero() {
        let grid = SweepGrid::new(
            vec![0.01],
            spaced(0.0, 3.0, 301, Spacing::Linear).unwrap(),
            Spacing::Linear,
            Method::Analytic,
        )
        .unwrap();
        let r = heatmap(&grid, &opts(1)).unwrap();
        assert!(r.rows.iter().all(|w| w.concurrence < 0.02));
    }

    #[test]
    fn strong_coupling_ridges_at_half_rabi_period() {
        let xi: f64 = 10.0;
        let taus = spaced(0.0, 3.0, 3001, Spacing::Linear).unwrap();
        let grid = SweepGrid::new(vec![xi], taus, Spacing::Linear, Method::Analytic).unwrap();
        let r = heatmap(&grid, &opts(1)).unwrap();
        let c: Vec<f64> = r.rows.iter().map(|w| w.concurrence).collect();
        let peaks: Vec<f64> = (1..c.len() - 1)
            .filter(|&i| c[i] > c[i - 1] && c[i] >= c[i + 1])
            .map(|i| r.rows[i].tau)
            .collect();
        let omega = (xi * xi - 1.0).sqrt();
        for (k, tau) in peaks.iter().take(4).enumerate() {
            let expect = (2 * k + 1) as f64 * std::f64::consts::PI / (4.0 * omega);
            assert!((tau - expect).abs() < 0.02, "peak {k} at {tau}, expected near {expect}");
        }
    }

    #[test]
    fn cmax_curve_golden_and_monotone() {
        let curve = cmax_curve(&default_cmax_grid(), &opts(3)).unwrap();
        assert!(curve.is_monotone(), "{:?}", curve.violations);
        let last = curve.rows.last().unwrap();
        assert!(last.record.c_max >= 0.97);
        assert!(last.derivative > 0.0 && last.derivative < 1e-3);
        assert!(curve.rows.iter().all(|r| r.derivative > 0.0));
        let one = cmax_curve(&[1.0, 2.0], &opts(1)).unwrap();
        assert!((one.rows[0].record.c_max - 0.586935717510938).abs() < 1e-9);
        assert!((one.rows[1].record.c_max - 0.755932763647209).abs() < 1e-9);
    }

    #[test]
    fn violations_are_reported() {
        let v = monotonicity_violations(&[(1.0, 0.1), (2.0, 0.3), (3.0, 0.2), (4.0, 0.4), (5.0, 0.4)]);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].index, v[0].xi, v[0].previous), (2, 3.0, 0.3));
    }
}
