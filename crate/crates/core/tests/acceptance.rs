//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cmax_core::entanglement::{embed, wootters_concurrence};
use cmax_core::lindblad::{self, LindbladConfig};
use cmax_core::model::{pure_to_density, ModelParams, PureAmplitudes, RescaledTime};
use cmax_core::sideband::{self, SidebandConfig};
use cmax_core::sweep::{self, Method, Spacing, SweepGrid, SweepOptions};
use cmax_core::{analytic, multimode};

fn params(xi: f64) -> ModelParams<f64> {
    ModelParams::new(xi).expect("valid xi")
}

fn tau(t: f64) -> RescaledTime<f64> {
    RescaledTime::new(t).expect("valid tau")
}

fn grid(t_end: f64, n: usize) -> Vec<f64> {
    lindblad::uniform_samples(t_end, n)
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

/// Invariant extremes gathered from the oracle runs of AC1 and AC2.
#[derive(Default)]
struct Invariants {
    trace: f64,
    min_eigenvalue: f64,
    norm: f64,
    samples: usize,
}

fn ac1(inv: &mut Invariants) -> Outcome {
    let samples = grid(6.0, 401);
    let mut worst = 0.0f64;
    for xi in [0.2, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let p = params(xi);
        let states = match lindblad::integrate(&LindbladConfig::new(p, tau(6.0)), &samples) {
            Ok(s) => s,
            Err(e) => return Outcome::new(false, format!("lindblad failed at xi = {xi}: {e}")),
        };
        for (rho, &t) in states.iter().zip(&samples) {
            let c = analytic::concurrence(&p, tau(t));
            worst = worst.max((c - 2.0 * rho.coherence().norm()).abs());
            inv.trace = inv.trace.max((rho.trace() - Complex::new(1.0, 0.0)).norm());
            let ev = rho.eigenvalues().map_or(f64::NAN, |e| e[0]);
            inv.min_eigenvalue = inv.min_eigenvalue.min(ev);
            inv.samples += 1;
        }
    }
    Outcome::new(worst < 1e-6, format!("max |C - 2|rho_e0,g1|| = {worst:.3e} (< 1e-6)"))
}

fn ac2(inv: &mut Invariants) -> Outcome {
    let p = params(2.0);
    let samples = grid(3.0, 301);
    let mut errors = Vec::new();
    for n in [501, 1001, 2001, 4001] {
        let run = multimode::sample_bath(&p, n, 60.0)
            .and_then(|bath| multimode::evolve(&bath, tau(3.0), bath.max_step(), &samples));
        let states = match run {
            Ok(s) => s,
            Err(e) => return Outcome::new(false, format!("multimode failed at N = {n}: {e}")),
        };
        let mut err = 0.0f64;
        for (s, &t) in states.iter().zip(&samples) {
            let exact = analytic::amplitudes(&p, tau(t)).c_e0.norm_sqr();
            err = err.max((s.excited_population() - exact).abs());
            inv.norm = inv.norm.max((s.norm_sqr() - 1.0).abs());
            inv.samples += 1;
        }
        errors.push(err);
    }
    let last = errors[errors.len() - 1];
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let listed: Vec<String> = errors.iter().map(|e| format!("{e:.6e}")).collect();
    Outcome::new(
        last < 5e-3 && monotone,
        format!(
            "error(N=4001) = {last:.3e} (< 5e-3); errors over N = 501, 1001, 2001, 4001: [{}]; strictly decreasing: {monotone}",
            listed.join(", ")
        ),
    )
}

#[allow(clippy::approx_constant)]
fn ac3() -> Outcome {
    let r1 = analytic::c_max(&params(1.0));
    let r2 = analytic::c_max(&params(2.0));
    let (Ok(r1), Ok(r2)) = (r1, r2) else {
        return Outcome::new(false, "c_max failed".into());
    };
    let d = [
        (r1.c_max - 0.58694).abs(),
        (r1.tau_opt.value() - 0.70711).abs(),
        (r2.c_max - 0.75597).abs(),
        (r2.tau_opt.value() - 0.38051).abs(),
    ];
    Outcome::new(
        d[0] <= 1e-4 && d[1] <= 1e-4 && d[2] <= 1e-3 && d[3] <= 1e-4,
        format!(
            "xi=1: C_max = {:.6}, tau_opt = {:.6}; xi=2: C_max = {:.6}, tau_opt = {:.6}",
            r1.c_max,
            r1.tau_opt.value(),
            r2.c_max,
            r2.tau_opt.value()
        ),
    )
}

fn ac4() -> Outcome {
    let curve = match sweep::cmax_curve(&sweep::default_cmax_grid(), &SweepOptions::default()) {
        Ok(c) => c,
        Err(e) => return Outcome::new(false, format!("cmax curve failed: {e}")),
    };
    let last = curve.rows.last().map_or(f64::NAN, |r| r.record.c_max);
    let min_slope = curve.rows.iter().map(|r| r.derivative).fold(f64::INFINITY, f64::min);
    let slope = |xi: f64| analytic::c_max_derivative(xi, analytic::default_derivative_step(xi)).unwrap_or(f64::NAN);
    let (s50, s05) = (slope(50.0), slope(0.5));
    Outcome::new(
        curve.is_monotone() && last >= 0.97 && min_slope > 0.0 && s50 < s05,
        format!(
            "non-decreasing: {}; C_max(100) = {last:.6}; min dC_max/dxi = {min_slope:.3e}; slope(50) = {s50:.3e} < slope(0.5) = {s05:.3e}",
            curve.is_monotone()
        ),
    )
}

fn ac5() -> Outcome {
    let xi = 50.0;
    let Ok(r) = analytic::c_max(&params(xi)) else {
        return Outcome::new(false, "c_max failed".into());
    };
    let predicted = PI / (4.0 * xi);
    let rel = (r.tau_opt.value() - predicted).abs() / predicted;
    Outcome::new(
        rel < 0.02 && r.c_max >= 0.94,
        format!(
            "tau_opt = {:.6e} vs pi/(4 xi) = {predicted:.6e} (rel {rel:.3e} < 2e-2); C = {:.6} (>= 0.94)",
            r.tau_opt.value(),
            r.c_max
        ),
    )
}

/// Least-squares slope of ln p against τ, negated.
fn fitted_rate(taus: &[f64], pops: &[f64]) -> f64 {
    let n = taus.len() as f64;
    let ys: Vec<f64> = pops.iter().map(|p| p.ln()).collect();
    let mx = taus.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = taus.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = taus.iter().map(|x| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}

fn ac6() -> Outcome {
    let xi = 0.05;
    let p = params(xi);
    let t_end = 2.0 / (xi * xi);
    let samples = grid(t_end, 401);
    let expected = xi * xi;

    let lind = lindblad::integrate(&LindbladConfig::new(p, tau(t_end)), &samples)
        .map(|s| s.iter().map(|r| r.population(cmax_core::model::E0)).collect::<Vec<_>>());
    let multi = multimode::sample_bath(&p, 2001, 1.0).and_then(|bath| {
        let horizon = bath.recurrence_horizon();
        let s = multimode::evolve(&bath, tau(t_end), bath.max_step(), &samples)?;
        Ok((horizon, s.iter().map(|m| m.excited_population()).collect::<Vec<_>>()))
    });
    let (lind, (horizon, multi)) = match (lind, multi) {
        (Ok(l), Ok(m)) => (l, m),
        (Err(e), _) | (_, Err(e)) => return Outcome::new(false, format!("integration failed: {e}")),
    };
    let rl = fitted_rate(&samples, &lind);
    let rm = fitted_rate(&samples, &multi);
    let dl = (rl - expected).abs() / expected;
    let dm = (rm - expected).abs() / expected;
    Outcome::new(
        dl < 0.05 && dm < 0.05 && t_end < horizon,
        format!(
            "xi^2 = {expected:.4e}; lindblad rate {rl:.5e} (rel {dl:.2e}); multimode rate {rm:.5e} (rel {dm:.2e}, N = 2001, W = 1, horizon {horizon:.1} > {t_end:.0})"
        ),
    )
}

fn ac7() -> Outcome {
    let mut slope = 0.0f64;
    let mut gap = 0.0f64;
    for xi in [1.2, 2.0, 5.0, 10.0, 50.0] {
        let p = params(xi);
        let Ok(f) = analytic::t_opt_formula(&p) else {
            return Outcome::new(false, format!("no closed form at xi = {xi}"));
        };
        let t = f.value();
        let h = 1e-6;
        let d = (analytic::concurrence(&p, tau(t + h)) - analytic::concurrence(&p, tau(t - h))) / (2.0 * h);
        slope = slope.max(d.abs());
        gap = gap.max((t - analytic::t_opt_numeric(&p).tau.value()).abs());
    }
    Outcome::new(
        slope < 1e-6 && gap < 1e-6,
        format!("max |dC/dtau| = {slope:.3e} (< 1e-6); max |t_formula - t_numeric| = {gap:.3e} (< 1e-6)"),
    )
}

fn ac8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let d = pure_to_density(&PureAmplitudes::random(&mut rng)).and_then(|rho| {
            let w = wootters_concurrence(&embed(&rho))?;
            Ok((w - 2.0 * rho.coherence().norm()).abs())
        });
        worst = worst.max(d.unwrap_or(f64::NAN));
    }
    Outcome::new(
        worst < 1e-10,
        format!("max |C_W - 2|rho_e0,g1|| over 1000 states = {worst:.3e} (< 1e-10)"),
    )
}

fn ac9(inv: &Invariants) -> Outcome {
    Outcome::new(
        inv.trace < 1e-9 && inv.min_eigenvalue >= -1e-9 && inv.norm < 1e-9,
        format!(
            "{} samples: trace error {:.3e}, min eigenvalue {:.3e}, multimode norm drift {:.3e}",
            inv.samples, inv.trace, inv.min_eigenvalue, inv.norm
        ),
    )
}

/// Ascending series for J_n(x).
fn series_jn(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = (1..=n).fold(1.0, |t, k| t * half / k as f64);
    let mut sum = term;
    for m in 1..300u32 {
        term *= -half * half / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() < 1e-22 {
            break;
        }
    }
    sum
}

fn ac10() -> Outcome {
    let xs = [0.1, 0.5, 1.0, 2.0, 5.0];
    let jn = |n: u32, x: f64| sideband::bessel_jn(n, x).unwrap_or(f64::NAN);
    let mut series = 0.0f64;
    let mut recurrence = 0.0f64;
    for n in 0..=10u32 {
        for &x in &xs {
            series = series.max((jn(n, x) - series_jn(n, x)).abs());
            if n >= 1 {
                let lhs = jn(n - 1, x) + jn(n + 1, x);
                recurrence = recurrence.max((lhs - 2.0 * n as f64 / x * jn(n, x)).abs());
            }
        }
    }
    let (g, nu, kappa) = (1.0, 1.0, 1.0);
    let mut round_trip = 0.0f64;
    for n in [1u32, 2] {
        let (_, peak) = sideband::first_maximum::<f64>(n).unwrap_or((f64::NAN, f64::NAN));
        for frac in [0.05, 0.3, 0.6, 0.9, 0.999] {
            let target_xi = 4.0 * g * peak * frac / kappa;
            let target_lambda = target_xi * kappa / 4.0;
            let lambda = sideband::solve_amplitude(g, nu, n, kappa, target_xi)
                .and_then(|a| sideband::effective_coupling(&SidebandConfig::new(g, a.epsilon, nu, n)?))
                .unwrap_or(f64::NAN);
            round_trip = round_trip.max((lambda - target_lambda).abs() / target_lambda);
        }
    }
    Outcome::new(
        series < 1e-12 && recurrence < 1e-10 && round_trip < 1e-9,
        format!(
            "series error {series:.3e} (< 1e-12); recurrence {recurrence:.3e} (< 1e-10); round-trip rel {round_trip:.3e} (< 1e-9)"
        ),
    )
}

fn data_bits(result: &sweep::SweepResult) -> Vec<u64> {
    result.rows.iter().flat_map(|r| r.values().map(f64::to_bits)).collect()
}

fn ac11() -> Outcome {
    let analytic_grid = SweepGrid::default_heatmap(Method::Analytic);
    let small = |method| {
        SweepGrid::new(
            sweep::spaced(0.1, 10.0, 9, Spacing::Log).expect("grid"),
            sweep::spaced(0.0, 3.0, 61, Spacing::Linear).expect("grid"),
            Spacing::Log,
            method,
        )
        .expect("grid")
    };
    let cases = [
        ("analytic 81x301", analytic_grid),
        ("lindblad 9x61", small(Method::Lindblad)),
        ("multimode 9x61", small(Method::Multimode)),
    ];
    let mut details = Vec::new();
    let mut pass = true;
    for (name, grid) in &cases {
        let mut reference: Option<Vec<u64>> = None;
        let mut same = true;
        for threads in [Some(1), Some(4), Some(1), None, Some(3)] {
            let opts = SweepOptions {
                threads,
                multimode_modes: 501,
                ..SweepOptions::default()
            };
            match sweep::heatmap(grid, &opts) {
                Ok(r) => {
                    let bits = data_bits(&r);
                    match &reference {
                        None => reference = Some(bits),
                        Some(b) => same &= *b == bits,
                    }
                }
                Err(e) => {
                    same = false;
                    details.push(format!("{name}: {e}"));
                }
            }
        }
        pass &= same;
        details.push(format!("{name}: {}", if same { "identical" } else { "differs" }));
    }
    Outcome::new(pass, format!("threads 1, 4, 1, default, 3: {}", details.join("; ")))
}

fn main() -> ExitCode {
    let mut inv = Invariants {
        min_eigenvalue: f64::INFINITY,
        ..Invariants::default()
    };
    let mut failed = 0;
    let mut report = |label: &str, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{label} {verdict} [{:.1}s] {}", start.elapsed().as_secs_f64(), o.detail);
        if !o.pass {
            failed += 1;
        }
    };
    report("AC1", &mut || ac1(&mut inv));
    report("AC2", &mut || ac2(&mut inv));
    report("AC3", &mut ac3);
    report("AC4", &mut ac4);
    report("AC5", &mut ac5);
    report("AC6", &mut ac6);
    report("AC7", &mut ac7);
    report("AC8", &mut ac8);
    report("AC9", &mut || ac9(&inv));
    report("AC10", &mut ac10);
    report("AC11", &mut ac11);
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
