//! Brute-force continuum oracle: the Lorentzian reservoir sampled on a
//! uniform frequency grid, evolved in the single-excitation sector.
//!
//! Rescaled units throughout: detunings and couplings in units of κ/4, time
//! in τ = κt/4. The Lorentzian then has half-width 2 and the bath
//! correlation is ξ²e^{−2τ}.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{ModelParams, RescaledTime};
use crate::scalar::{lit, Real};

pub const DEFAULT_MODES: usize = 2001;
/// Half-width of the sampled band, in units of κ.
pub const DEFAULT_WINDOW: f64 = 40.0;
/// Steps resolve the fastest rotation to this phase.
pub const PHASE_PER_STEP: f64 = 0.05;
pub const NORM_INVARIANT: f64 = 1e-9;
pub const NORM_FAILURE: f64 = 1e-6;

/// Half-width of the Lorentzian in rescaled units.
const HALF_WIDTH: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedBath<T> {
    pub xi: T,
    /// Mode detunings δ_k, rescaled.
    pub detunings: Vec<T>,
    /// Mode couplings g_k, rescaled.
    pub couplings: Vec<T>,
    /// Half-width W of the sampled interval in units of κ (0 for a single mode).
    pub window: T,
}

impl<T: Real> DiscretizedBath<T> {
    pub fn n_modes(&self) -> usize {
        self.detunings.len()
    }

    /// Grid spacing in rescaled units; zero for a single mode.
    pub fn spacing(&self) -> T {
        if self.n_modes() < 2 {
            T::zero()
        } else {
            self.detunings[1] - self.detunings[0]
        }
    }

    /// Σ g_k².
    pub fn total_weight(&self) -> T {
        self.couplings.iter().fold(T::zero(), |acc, &g| acc + g * g)
    }

    /// Σ g_k² e^{−iδ_kτ}.
    pub fn correlation(&self, tau: T) -> Complex<T> {
        self.detunings
            .iter()
            .zip(&self.couplings)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&d, &g)| {
                acc + Complex::from_polar(g * g, -d * tau)
            })
    }

    /// Time after which the discrete bath returns energy to the qubit,
    /// 2π/Δ. Zero for a single mode.
    pub fn recurrence_horizon(&self) -> T {
        let d = self.spacing();
        if d > T::zero() {
            T::TAU() / d
        } else {
            T::zero()
        }
    }

    /// Largest step allowed by the phase-resolution rule, taken against the
    /// band edge 4W (which bounds every |δ_k|) so that baths sharing a
    /// window also share a time grid.
    pub fn max_step(&self) -> T {
        let fastest = self
            .detunings
            .iter()
            .fold(self.xi.max(lit::<T>(4.0) * self.window), |acc, &d| acc.max(d.abs()));
        lit::<T>(PHASE_PER_STEP) / fastest
    }
}

/// Continuum Lorentzian density in rescaled units, normalized to unit mass.
pub fn lorentzian<T: Real>(delta: T) -> T {
    let w = lit::<T>(HALF_WIDTH);
    w / (T::PI() * (delta * delta + w * w))
}

/// ξ²e^{−2τ}: correlation of the untruncated continuum.
pub fn lorentzian_kernel<T: Real>(xi: T, tau: T) -> T {
    xi * xi * (-lit::<T>(HALF_WIDTH) * tau.abs()).exp()
}

/// Fraction of the Lorentzian mass inside |δ| ≤ W·κ.
pub fn truncated_mass<T: Real>(window: T) -> T {
    lit::<T>(2.0) / T::PI() * (lit::<T>(2.0) * window).atan()
}

/// Midpoint grid: `n_modes` equal bins tiling [−Wκ, Wκ], one mode at the
/// centre of each, with couplings g_k = ξ√(J(δ_k)Δ).
pub fn sample_bath<T: Real>(params: &ModelParams<T>, n_modes: usize, window: T) -> Result<DiscretizedBath<T>> {
    if n_modes < 2 {
        return Err(Error::Domain(format!("need at least two modes, got {n_modes}")));
    }
    if !(window > T::zero()) || !window.is_finite() {
        return Err(Error::Domain(format!("window must be positive, got {window}")));
    }
    let xi = params.xi();
    let edge = lit::<T>(4.0) * window;
    let n = T::from_usize_lossy(n_modes);
    let step = lit::<T>(2.0) * edge / n;
    // Centre k sits at edge·(2k + 1 − n)/n, so k and n−1−k are exact negatives.
    let detunings: Vec<T> = (0..n_modes)
        .map(|k| {
            if 2 * k + 1 == n_modes {
                T::zero()
            } else {
                edge * (T::from_usize_lossy(2 * k + 1) - n) / n
            }
        })
        .collect();
    let couplings = detunings.iter().map(|&d| xi * (lorentzian(d) * step).sqrt()).collect();
    Ok(DiscretizedBath {
        xi,
        detunings,
        couplings,
        window,
    })
}

/// The zero-width limit: one resonant mode carrying the full coupling.
pub fn single_mode<T: Real>(params: &ModelParams<T>) -> DiscretizedBath<T> {
    DiscretizedBath {
        xi: params.xi(),
        detunings: vec![T::zero()],
        couplings: vec![params.xi()],
        window: T::zero(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeState<T> {
    pub c_e: Complex<T>,
    pub c_k: Vec<Complex<T>>,
}

impl<T: Real> MultimodeState<T> {
    pub fn excited(n_modes: usize) -> Self {
        Self {
            c_e: Complex::new(T::one(), T::zero()),
            c_k: vec![Complex::new(T::zero(), T::zero()); n_modes],
        }
    }

    pub fn excited_population(&self) -> T {
        self.c_e.norm_sqr()
    }

    pub fn norm_sqr(&self) -> T {
        self.c_k.iter().fold(self.c_e.norm_sqr(), |acc, z| acc + z.norm_sqr())
    }

    /// Amplitude of the collective mode the qubit couples to,
    /// Σ g_k c_k / √(Σ g_k²).
    pub fn pseudomode_amplitude(&self, bath: &DiscretizedBath<T>) -> Complex<T> {
        let w = bath.total_weight().sqrt();
        let s = self
            .c_k
            .iter()
            .zip(&bath.couplings)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&c, &g)| acc + c * g);
        s / w
    }
}

/// Qubit–reservoir concurrence of the pure global state, 2|c_e|√(1−|c_e|²).
pub fn reservoir_concurrence<T: Real>(state: &MultimodeState<T>) -> T {
    let p = state.excited_population().min(T::one());
    lit::<T>(2.0) * (p * (T::one() - p)).sqrt()
}

/// 2|c_e||b| with b the pseudomode amplitude: the counterpart of the
/// no-jump concurrence, excluding excitation already spread into the bath.
pub fn extractable_concurrence<T: Real>(state: &MultimodeState<T>, bath: &DiscretizedBath<T>) -> T {
    lit::<T>(2.0) * state.c_e.norm() * state.pseudomode_amplitude(bath).norm()
}

/// One factor (z + r)/(z − r) of the Padé(2,2) propagator, z = −iH·h, for
/// the star Hamiltonian H = [[0, gᵀ], [g, diag δ]].
struct CayleyFactor<T> {
    r: Complex<T>,
    /// −i h g_k
    c: Vec<Complex<T>>,
    /// 1 / (−i h δ_k − r)
    inv_d: Vec<Complex<T>>,
    /// 1 / (−r − Σ c_k² / d_k)
    inv_schur: Complex<T>,
    minus_ih_delta: Vec<Complex<T>>,
}

impl<T: Real> CayleyFactor<T> {
    fn new(bath: &DiscretizedBath<T>, h: T, r: Complex<T>) -> Self {
        let mih = Complex::new(T::zero(), -h);
        let c: Vec<_> = bath.couplings.iter().map(|&g| mih * g).collect();
        let minus_ih_delta: Vec<_> = bath.detunings.iter().map(|&d| mih * d).collect();
        let inv_d: Vec<_> = minus_ih_delta.iter().map(|&z| (z - r).inv()).collect();
        let schur = c.iter().zip(&inv_d).fold(-r, |acc, (&ck, &id)| acc - ck * ck * id);
        Self {
            r,
            c,
            inv_d,
            inv_schur: schur.inv(),
            minus_ih_delta,
        }
    }

    /// x ← (z − r)⁻¹ (z + r) x, in O(N).
    fn apply(&self, e: &mut Complex<T>, modes: &mut [Complex<T>]) {
        // b = (z + r) x
        let mut b0 = self.r * *e;
        for ((m, &ck), &zd) in modes.iter_mut().zip(&self.c).zip(&self.minus_ih_delta) {
            b0 = b0 + ck * *m;
            *m = ck * *e + (zd + self.r) * *m;
        }
        // (z − r) x = b, arrowhead elimination
        let mut rhs0 = b0;
        for ((m, &ck), &id) in modes.iter().zip(&self.c).zip(&self.inv_d) {
            rhs0 = rhs0 - ck * *m * id;
        }
        let x0 = rhs0 * self.inv_schur;
        for ((m, &ck), &id) in modes.iter_mut().zip(&self.c).zip(&self.inv_d) {
            *m = (*m - ck * x0) * id;
        }
        *e = x0;
    }
}

fn propagator<T: Real>(bath: &DiscretizedBath<T>, h: T) -> [CayleyFactor<T>; 2] {
    // 1 − z/2 + z²/12 has roots 3 ± i√3.
    let three = lit::<T>(3.0);
    let s3 = three.sqrt();
    [
        CayleyFactor::new(bath, h, Complex::new(three, s3)),
        CayleyFactor::new(bath, h, Complex::new(three, -s3)),
    ]
}

/// Evolves |e⟩⊗|vac⟩ under the star Hamiltonian and returns the state at
/// each of the sorted `samples` in [0, t_end]. Steps never exceed `dt` or
/// the phase-resolution limit and land exactly on each sample.
pub fn evolve<T: Real>(
    bath: &DiscretizedBath<T>,
    t_end: RescaledTime<T>,
    dt: T,
    samples: &[T],
) -> Result<Vec<MultimodeState<T>>> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if bath.n_modes() == 0 || bath.couplings.len() != bath.n_modes() {
        return Err(Error::Domain(
            "bath needs matching, non-empty detunings and couplings".into(),
        ));
    }
    let t_end = t_end.value();
    if samples.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("sample times must be sorted".into()));
    }
    if let Some(&bad) = samples.iter().find(|&&s| !(s >= T::zero() && s <= t_end)) {
        return Err(Error::Domain(format!("sample time {bad} outside [0, {t_end}]")));
    }
    let h_max = dt.min(bath.max_step());

    let mut state = MultimodeState::excited(bath.n_modes());
    let mut t = T::zero();
    let mut cached: Option<(T, [CayleyFactor<T>; 2])> = None;
    let mut out = Vec::with_capacity(samples.len());
    for &target in samples {
        let span = target - t;
        if span > T::zero() {
            let steps = (span / h_max).ceil().max(T::one());
            let h = span / steps;
            let reuse = matches!(&cached, Some((hc, _)) if *hc == h);
            if !reuse {
                cached = Some((h, propagator(bath, h)));
            }
            let (_, factors) = cached.as_ref().expect("propagator cached above");
            let n = steps.to_usize().unwrap_or(usize::MAX);
            for _ in 0..n {
                for f in factors {
                    f.apply(&mut state.c_e, &mut state.c_k);
                }
            }
            t = target;
        }
        let drift = (state.norm_sqr() - T::one()).abs();
        if !(drift <= lit(NORM_FAILURE)) {
            return Err(Error::IntegrationFailure {
                tau: t.to_f64_lossy(),
                reason: format!("norm drift {drift:e}"),
            });
        }
        out.push(state.clone());
    }
    Ok(out)
}
