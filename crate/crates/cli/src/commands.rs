use serde_json::json;

use cmax_core::analytic;
use cmax_core::lindblad::Mutation;
use cmax_core::model::{ModelParams, RescaledTime};
use cmax_core::sideband::{self, SidebandConfig};
use cmax_core::sweep::{self, Method, Spacing, SweepGrid, SweepOptions};
use cmax_core::verify::{self, VerifyMode, VerifyOptions};

use crate::output::{Cell, Table};
use crate::{Failure, MethodArg, MutationArg, NumericArgs, ScaleArg};

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Analytic => Method::Analytic,
            MethodArg::Lindblad => Method::Lindblad,
            MethodArg::Multimode => Method::Multimode,
        }
    }
}

impl From<ScaleArg> for Spacing {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Log => Spacing::Log,
            ScaleArg::Linear => Spacing::Linear,
        }
    }
}

fn sweep_options(numeric: &NumericArgs, threads: Option<usize>) -> SweepOptions {
    SweepOptions {
        threads,
        lindblad_tol: numeric.tol,
        multimode_modes: numeric.modes,
        multimode_window: numeric.window,
        ..SweepOptions::default()
    }
}

fn numeric_meta(table: &mut Table, method: Method, numeric: &NumericArgs) {
    match method {
        Method::Analytic => {}
        Method::Lindblad => table.meta("tol", json!(numeric.tol)),
        Method::Multimode => {
            table.meta("modes", json!(numeric.modes));
            table.meta("window", json!(numeric.window));
        }
    }
}

fn horizon_note(table: &mut Table, xi: f64, tau_max: f64, numeric: &NumericArgs) -> Result<(), Failure> {
    let bath = cmax_core::multimode::sample_bath(&ModelParams::new(xi)?, numeric.modes, numeric.window)?;
    let horizon = bath.recurrence_horizon();
    table.meta("recurrence_horizon", json!(horizon));
    if tau_max >= horizon {
        eprintln!("warning: tau_max = {tau_max} reaches the bath recurrence horizon {horizon:.4}; late samples are unreliable");
    }
    Ok(())
}

pub fn evolve(
    xi: f64,
    tau_max: f64,
    steps: usize,
    method: MethodArg,
    numeric: &NumericArgs,
    threads: Option<usize>,
) -> Result<Table, Failure> {
    let method = Method::from(method);
    let taus = sweep::spaced(0.0, tau_max, steps, Spacing::Linear).map_err(|e| Failure::Usage(e.to_string()))?;
    let rows = sweep::evaluate_row(xi, &taus, method, &sweep_options(numeric, threads))?;
    let analytic_cols = [
        "tau",
        "c_re_e0",
        "c_im_e0",
        "c_re_g1",
        "c_im_g1",
        "p_e0",
        "p_g1",
        "p_g0",
        "survival",
        "concurrence",
    ];
    let numeric_cols = ["tau", "p_e0", "p_g1", "p_g0", "survival", "concurrence"];
    let mut table = Table::new(
        "evolve",
        if method == Method::Analytic {
            &analytic_cols
        } else {
            &numeric_cols
        },
    );
    table.meta("xi", json!(xi));
    table.meta("tau_max", json!(tau_max));
    table.meta("steps", json!(steps));
    table.meta("method", json!(method.as_str()));
    numeric_meta(&mut table, method, numeric);
    if method == Method::Multimode {
        horizon_note(&mut table, xi, tau_max, numeric)?;
    }
    let params = ModelParams::new(xi)?;
    for r in rows {
        let tail: [Cell; 5] = [
            r.p_e0.into(),
            r.p_g1.into(),
            r.p_g0.into(),
            r.survival.into(),
            r.concurrence.into(),
        ];
        let mut row: Vec<Cell> = vec![r.tau.into()];
        if method == Method::Analytic {
            let psi = analytic::amplitudes(&params, RescaledTime::new(r.tau)?);
            row.extend([psi.c_e0.re, psi.c_e0.im, psi.c_g1.re, psi.c_g1.im].map(Cell::Num));
        }
        row.extend(tail);
        table.push(row);
    }
    Ok(table)
}

pub struct HeatmapSpec {
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_steps: usize,
    pub xi_scale: ScaleArg,
    pub tau_max: f64,
    pub tau_steps: usize,
    pub method: MethodArg,
}

pub fn heatmap(spec: &HeatmapSpec, numeric: &NumericArgs, threads: Option<usize>) -> Result<Table, Failure> {
    let usage = |e: cmax_core::Error| Failure::Usage(e.to_string());
    let spacing = Spacing::from(spec.xi_scale);
    let method = Method::from(spec.method);
    let grid = SweepGrid::new(
        sweep::spaced(spec.xi_min, spec.xi_max, spec.xi_steps, spacing).map_err(usage)?,
        sweep::spaced(0.0, spec.tau_max, spec.tau_steps, Spacing::Linear).map_err(usage)?,
        spacing,
        method,
    )
    .map_err(usage)?;
    let result = sweep::heatmap(&grid, &sweep_options(numeric, threads))?;
    let mut table = Table::new("heatmap", &["xi", "tau", "concurrence"]);
    table.meta("xi_min", json!(spec.xi_min));
    table.meta("xi_max", json!(spec.xi_max));
    table.meta("xi_steps", json!(spec.xi_steps));
    table.meta("xi_scale", json!(spacing.as_str()));
    table.meta("tau_max", json!(spec.tau_max));
    table.meta("tau_steps", json!(spec.tau_steps));
    table.meta("method", json!(method.as_str()));
    numeric_meta(&mut table, method, numeric);
    if let Some(h) = result.metadata.recurrence_horizon {
        table.meta("recurrence_horizon", json!(h));
    }
    table.meta("wall_time_s", json!(result.metadata.wall_time_s));
    for r in &result.rows {
        table.push(vec![r.xi.into(), r.tau.into(), r.concurrence.into()]);
    }
    Ok(table)
}

pub fn cmax(xi_min: f64, xi_max: f64, steps: usize, scale: ScaleArg, threads: Option<usize>) -> Result<Table, Failure> {
    let spacing = Spacing::from(scale);
    let xis = sweep::spaced(xi_min, xi_max, steps, spacing).map_err(|e| Failure::Usage(e.to_string()))?;
    let opts = SweepOptions {
        threads,
        ..SweepOptions::default()
    };
    let curve = sweep::cmax_curve(&xis, &opts)?;
    let mut table = Table::new("cmax", &sweep::CmaxRow::COLUMNS);
    table.meta("xi_min", json!(xi_min));
    table.meta("xi_max", json!(xi_max));
    table.meta("steps", json!(steps));
    table.meta("scale", json!(spacing.as_str()));
    table.meta("monotone", json!(curve.is_monotone()));
    table.meta(
        "monotonicity_violations",
        serde_json::to_value(&curve.violations).unwrap_or_default(),
    );
    if !curve.is_monotone() {
        eprintln!(
            "warning: c_max decreases at {} point(s); see metadata",
            curve.violations.len()
        );
    }
    for r in &curve.rows {
        table.push(vec![
            r.record.xi.into(),
            r.record.tau_opt.value().into(),
            r.record.c_max.into(),
            r.derivative.into(),
            r.record.source.as_str().into(),
        ]);
    }
    Ok(table)
}

pub struct SidebandSpec {
    pub g: f64,
    pub kappa: f64,
    pub n: u32,
    pub nu: f64,
    pub target_xi: Option<f64>,
    pub epsilon: Option<f64>,
    pub omega_q: Option<f64>,
    pub omega_r: Option<f64>,
}

pub fn sideband(spec: &SidebandSpec) -> Result<Table, Failure> {
    let check_frequencies = |cfg: SidebandConfig<f64>| match (spec.omega_q, spec.omega_r) {
        (Some(q), Some(r)) => cfg.with_frequencies(q, r),
        _ => Ok(cfg),
    };
    let mut table;
    match (spec.target_xi, spec.epsilon) {
        (Some(target), None) => {
            let a = sideband::solve_amplitude(spec.g, spec.nu, spec.n, spec.kappa, target)?;
            check_frequencies(SidebandConfig::new(spec.g, a.epsilon, spec.nu, spec.n)?)?;
            table = Table::new("sideband", &["epsilon", "mu", "lambda", "xi"]);
            table.meta("mode", json!("inverse"));
            table.meta("target_xi", json!(target));
            table.push(vec![a.epsilon.into(), a.mu.into(), a.lambda.into(), target.into()]);
        }
        (None, Some(epsilon)) => {
            let cfg = check_frequencies(SidebandConfig::new(spec.g, epsilon, spec.nu, spec.n)?)?;
            let lambda = sideband::effective_coupling(&cfg)?;
            table = Table::new("sideband", &["epsilon", "mu", "lambda", "xi"]);
            table.meta("mode", json!("forward"));
            table.push(vec![
                epsilon.into(),
                cfg.mu().into(),
                lambda.into(),
                sideband::xi_from_coupling(lambda, spec.kappa).into(),
            ]);
        }
        _ => return Err(Failure::Usage("give exactly one of --target-xi and --epsilon".into())),
    }
    table.meta("g", json!(spec.g));
    table.meta("kappa", json!(spec.kappa));
    table.meta("n", json!(spec.n));
    table.meta("nu", json!(spec.nu));
    if let (Some(q), Some(r)) = (spec.omega_q, spec.omega_r) {
        table.meta("omega_q", json!(q));
        table.meta("omega_r", json!(r));
    }
    Ok(table)
}

pub fn verify(full: bool, mutate: Option<MutationArg>) -> (Table, bool) {
    let opts = VerifyOptions {
        mode: if full { VerifyMode::Full } else { VerifyMode::Quick },
        mutation: match mutate {
            None => Mutation::None,
            Some(MutationArg::FlipCouplingSign) => Mutation::FlipCouplingSign,
        },
    };
    let report = verify::verify(&opts);
    let mut table = Table::new("verify", &["name", "budget", "measured", "pass"]);
    table.meta("mode", json!(if full { "full" } else { "quick" }));
    if let Some(m) = mutate {
        table.meta("mutation", json!(format!("{m:?}")));
    }
    table.meta("passed", json!(report.passed()));
    table.meta("notes", json!(report.notes));
    for c in &report.checks {
        table.push(vec![
            c.name.as_str().into(),
            c.budget.into(),
            c.measured.into(),
            c.pass.into(),
        ]);
    }
    (table, report.passed())
}
