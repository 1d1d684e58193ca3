//! Closed-form no-jump dynamics of a qubit resonantly coupled to a
//! Lorentzian reservoir, the extractable concurrence it carries, and the
//! maximum of that concurrence over time.
//!
//! In rescaled time the no-jump amplitudes obey
//!
//! ```text
//! d/dτ c_e0 = -i ξ c_g1
//! d/dτ c_g1 = -i ξ c_e0 - 2 c_g1
//! ```
//!
//! whose solution is trigonometric above ξ = 1, hyperbolic below, and
//! polynomial times e^{-τ} at the critical point.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{ModelParams, PureAmplitudes, RescaledTime};
use crate::optimize::{golden_section_max, grid_scan};
use crate::scalar::{lit, Real};

/// Half-width of the window around ξ = 1 evaluated with the near-critical
/// expansion.
pub const CRITICAL_WINDOW: f64 = 1e-6;
/// Minimum number of coarse grid points for the numeric maximization.
pub const SCAN_POINTS: usize = 4096;
/// Bracket width at which golden-section refinement stops.
pub const REFINE_TOL: f64 = 1e-10;
/// Below this the concurrence is treated as identically zero.
pub const FLAT_FLOOR: f64 = 1e-14;
/// Largest allowed disagreement between the closed-form and numeric optimum.
pub const FORMULA_AGREEMENT: f64 = 1e-6;

/// Dynamical regime selected by ξ. `omega` is the rescaled frequency
/// Ω̃ = 4Ω/κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeBranch<T> {
    /// ξ > 1: damped vacuum Rabi oscillation, Ω̃ = √(ξ² − 1).
    Underdamped { omega: T },
    /// ξ < 1: overdamped decay, Ω̃ = √(1 − ξ²).
    Overdamped { omega: T },
    /// |ξ − 1| inside [`CRITICAL_WINDOW`].
    Critical,
}

impl<T: Real> RegimeBranch<T> {
    pub fn select(xi: T) -> Self {
        let d = xi - T::one();
        if d.abs() < lit(CRITICAL_WINDOW) {
            RegimeBranch::Critical
        } else if d > T::zero() {
            // (ξ-1)(ξ+1) avoids cancellation in ξ² - 1
            RegimeBranch::Underdamped {
                omega: (d * (xi + T::one())).sqrt(),
            }
        } else {
            RegimeBranch::Overdamped {
                omega: (-d * (xi + T::one())).sqrt(),
            }
        }
    }
}

/// `(cos-like, sin-like / Ω̃)` series in s = ξ² − 1, valid for either sign of
/// s. At s = 0 this is exactly `(1, τ)`.
fn near_critical_series<T: Real>(s: T, tau: T) -> (T, T) {
    let x = -s * tau * tau;
    let mut even = T::one();
    let mut odd = tau;
    let mut te = T::one();
    let mut to = tau;
    for k in 1..80 {
        let kf = T::from_usize_lossy(k);
        te = te * x / ((lit::<T>(2.0) * kf - T::one()) * (lit::<T>(2.0) * kf));
        to = to * x / ((lit::<T>(2.0) * kf) * (lit::<T>(2.0) * kf + T::one()));
        even = even + te;
        odd = odd + to;
        if te.abs() <= T::epsilon() * even.abs() && to.abs() <= T::epsilon() * odd.abs() {
            break;
        }
    }
    (even, odd)
}

/// e^{-τ}·(cos-like, sin-like/Ω̃) for each regime.
fn damped_modes<T: Real>(branch: RegimeBranch<T>, xi: T, tau: T) -> (T, T) {
    let env = (-tau).exp();
    match branch {
        RegimeBranch::Underdamped { omega } => {
            let (s, c) = (omega * tau).sin_cos();
            (env * c, env * s / omega)
        }
        RegimeBranch::Overdamped { omega } => {
            let arg = omega * tau;
            if arg < T::one() {
                (env * arg.cosh(), env * arg.sinh() / omega)
            } else {
                // e^{-τ}cosh(Ω̃τ) overflows termwise for long times; combine
                // exponents first. 1 - Ω̃ = ξ²/(1 + Ω̃).
                let slow = (-(xi * xi / (T::one() + omega)) * tau).exp();
                let fast = (-(T::one() + omega) * tau).exp();
                let half = lit::<T>(0.5);
                (half * (slow + fast), half * (slow - fast) / omega)
            }
        }
        RegimeBranch::Critical => {
            let (even, odd) = near_critical_series((xi - T::one()) * (xi + T::one()), tau);
            (env * even, env * odd)
        }
    }
}

/// No-jump amplitudes (c_e0, c_g1) at rescaled time τ, starting from |e,0⟩.
pub fn amplitudes<T: Real>(params: &ModelParams<T>, tau: RescaledTime<T>) -> PureAmplitudes<T> {
    let xi = params.xi();
    let tau = tau.value();
    if tau == T::zero() {
        return PureAmplitudes::excited();
    }
    let (cos_like, sin_like) = damped_modes(RegimeBranch::select(xi), xi, tau);
    PureAmplitudes::new(
        Complex::new(cos_like + sin_like, T::zero()),
        Complex::new(T::zero(), -xi * sin_like),
    )
}

/// ⟨ψ(τ)|ψ(τ)⟩: probability that no photon has leaked yet.
pub fn survival_probability<T: Real>(params: &ModelParams<T>, tau: RescaledTime<T>) -> T {
    amplitudes(params, tau).norm_sqr()
}

/// Extractable qubit-reservoir concurrence at τ.
///
/// Above the critical window this is ⟨ψ|ψ⟩·sin 2θ with
/// tan θ = |ξ sin(Ω̃τ) / (Ω̃ cos(Ω̃τ) + sin(Ω̃τ))|; elsewhere the equivalent
/// amplitude product 2|c_e0||c_g1|.
pub fn concurrence<T: Real>(params: &ModelParams<T>, tau: RescaledTime<T>) -> T {
    let xi = params.xi();
    let t = tau.value();
    match RegimeBranch::select(xi) {
        RegimeBranch::Underdamped { omega } => {
            let (s, c) = (omega * t).sin_cos();
            let theta = (xi * s).abs().atan2((omega * c + s).abs());
            survival_probability(params, tau) * (lit::<T>(2.0) * theta).sin()
        }
        _ => amplitudes(params, tau).concurrence(),
    }
}

/// Closed-form optimal rescaled time, defined for ξ > 1 only.
///
/// With κ̃ = 4, λ̃₀ = ξ:
/// τ_opt = |2·atan(½·√(N/Ω̃²)) / Ω̃|, N = κ̃² + 12Ω̃² − 4λ̃₀√(κ̃² + 8Ω̃²).
/// N is evaluated in the rationalized form 16Ω̃⁴ / (κ̃² + 12Ω̃² + 4λ̃₀√(κ̃² + 8Ω̃²)),
/// which is algebraically identical and free of cancellation as ξ → 1⁺.
pub fn t_opt_formula<T: Real>(params: &ModelParams<T>) -> Result<RescaledTime<T>> {
    let xi = params.xi();
    if !(xi > T::one()) {
        return Err(Error::BranchNotApplicable { xi: xi.to_f64_lossy() });
    }
    let s = (xi - T::one()) * (xi + T::one());
    let omega = s.sqrt();
    let k2 = lit::<T>(16.0);
    let plus = k2 + lit::<T>(12.0) * s + lit::<T>(4.0) * xi * (k2 + lit::<T>(8.0) * s).sqrt();
    let numerator = lit::<T>(16.0) * s * s / plus;
    let half_root = lit::<T>(0.5) * (numerator / s).sqrt();
    RescaledTime::new((lit::<T>(2.0) * half_root.atan() / omega).abs())
}

/// Outcome of the numeric maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptimum<T> {
    pub tau: RescaledTime<T>,
    pub value: T,
    /// Set when the concurrence never exceeds [`FLAT_FLOOR`] in the window;
    /// `tau` is then 0.
    pub zero_maximum: bool,
}

/// Search window `[0, τ_search]` and number of coarse grid points.
pub fn search_window<T: Real>(xi: T) -> (T, usize) {
    let ten = lit::<T>(10.0);
    match RegimeBranch::select(xi) {
        RegimeBranch::Underdamped { omega } => {
            // The first maximum is the global one and sits below 1/√2; keep
            // at least 32 samples per oscillation period of C.
            let per_period = lit::<T>(32.0) * ten * omega / T::PI();
            let points = per_period.ceil().to_usize().unwrap_or(SCAN_POINTS).max(SCAN_POINTS);
            (ten, points)
        }
        _ => {
            // Weak coupling peaks near τ ≈ ½·ln(4/ξ²).
            let weak = lit::<T>(2.0) * (lit::<T>(4.0) / (xi * xi)).ln();
            (ten.max(weak), SCAN_POINTS)
        }
    }
}

/// Global maximizer of the concurrence over the search window: coarse scan,
/// then golden-section refinement around the earliest best sample.
pub fn t_opt_numeric<T: Real>(params: &ModelParams<T>) -> NumericOptimum<T> {
    let (window, points) = search_window(params.xi());
    let c_at = |tau: T| concurrence(params, RescaledTime::new(tau.max(T::zero())).unwrap_or_default());
    let (idx, values) = grid_scan(c_at, T::zero(), window, points, lit(1e-12));
    if values[idx] < lit(FLAT_FLOOR) {
        return NumericOptimum {
            tau: RescaledTime::zero(),
            value: T::zero(),
            zero_maximum: true,
        };
    }
    let step = window / T::from_usize_lossy(points - 1);
    let lo = (T::from_usize_lossy(idx) - T::one()).max(T::zero()) * step;
    let hi = (T::from_usize_lossy(idx + 1) * step).min(window);
    let best = golden_section_max(c_at, lo, hi, lit(REFINE_TOL));
    NumericOptimum {
        tau: RescaledTime::new(best.x).unwrap_or_default(),
        value: best.value,
        zero_maximum: false,
    }
}

/// How an [`OptimumRecord`] obtained its optimal time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimumSource {
    Formula,
    Numeric,
}

impl OptimumSource {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimumSource::Formula => "formula",
            OptimumSource::Numeric => "numeric",
        }
    }
}

/// Maximum extractable concurrence for one ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumRecord<T> {
    pub xi: T,
    pub tau_opt: RescaledTime<T>,
    pub c_max: T,
    pub source: OptimumSource,
    pub zero_maximum: bool,
}

/// C_max(ξ): the closed-form optimum when it exists and agrees with the
/// numeric search, otherwise the numeric optimum.
pub fn c_max<T: Real>(params: &ModelParams<T>) -> Result<OptimumRecord<T>> {
    let numeric = t_opt_numeric(params);
    if let Ok(formula) = t_opt_formula(params) {
        if (formula.value() - numeric.tau.value()).abs() < lit(FORMULA_AGREEMENT) {
            return Ok(OptimumRecord {
                xi: params.xi(),
                tau_opt: formula,
                c_max: concurrence(params, formula),
                source: OptimumSource::Formula,
                zero_maximum: false,
            });
        }
    }
    Ok(OptimumRecord {
        xi: params.xi(),
        tau_opt: numeric.tau,
        c_max: numeric.value,
        source: OptimumSource::Numeric,
        zero_maximum: numeric.zero_maximum,
    })
}

/// Default finite-difference step for dC_max/dξ.
pub fn default_derivative_step<T: Real>(xi: T) -> T {
    lit::<T>(1e-4) * xi.max(T::one())
}

/// Central difference [C_max(ξ+h) − C_max(ξ−h)] / 2h.
pub fn c_max_derivative<T: Real>(xi: T, h: T) -> Result<T> {
    if !(h > T::zero()) || !(xi - h > T::zero()) {
        return Err(Error::Domain(format!(
            "derivative step requires xi > h > 0 (xi = {xi}, h = {h})"
        )));
    }
    let up = c_max(&ModelParams::new(xi + h)?)?.c_max;
    let down = c_max(&ModelParams::new(xi - h)?)?.c_max;
    Ok((up - down) / (lit::<T>(2.0) * h))
}
