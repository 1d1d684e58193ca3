//! Pseudomode master equation: the qubit exchanges its excitation with one
//! lossy mode, which leaks into a flat continuum.
//!
//! This is an independent route to the same dynamics as [`crate::analytic`];
//! nothing here uses the closed-form amplitudes.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::EigenReal;
use crate::model::{DensityMatrix3, ModelParams, RescaledTime, E0, G0, G1};
use crate::ode::{integrate_sampled, AdaptiveConfig};
use crate::scalar::{lit, Real};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_DT: f64 = 1e-3;
/// Mode decay rate in rescaled time.
pub const KAPPA_RESCALED: f64 = 4.0;
/// Invariant checks are never tighter than this, whatever the tolerance.
const CHECK_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct LindbladConfig<T> {
    pub params: ModelParams<T>,
    /// Initial step in rescaled time.
    pub dt: T,
    /// Local error tolerance per step.
    pub tol: T,
    pub t_end: RescaledTime<T>,
}

impl<T: Real> LindbladConfig<T> {
    pub fn new(params: ModelParams<T>, t_end: RescaledTime<T>) -> Self {
        Self {
            params,
            dt: lit(DEFAULT_DT),
            tol: lit(DEFAULT_TOL),
            t_end,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::Domain(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.tol > T::zero()) || !self.tol.is_finite() {
            return Err(Error::Domain(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Deliberate corruptions of the generator, used to show the cross-checks
/// actually detect a wrong model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Negates the exchange coupling.
    FlipCouplingSign,
}

/// Rescaled generator: H = coupling·(|e,0⟩⟨g,1| + h.c.), a = |g,0⟩⟨g,1|,
/// jump rate `decay`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator<T> {
    pub coupling: T,
    pub decay: T,
}

impl<T: Real> Generator<T> {
    pub fn from_params(params: &ModelParams<T>) -> Self {
        Self {
            coupling: params.xi(),
            decay: lit(KAPPA_RESCALED),
        }
    }

    pub fn mutated(params: &ModelParams<T>, mutation: Mutation) -> Self {
        let g = Self::from_params(params);
        match mutation {
            Mutation::None => g,
            Mutation::FlipCouplingSign => Self {
                coupling: -g.coupling,
                ..g
            },
        }
    }

    /// dρ/dτ = −i[H, ρ] + γ(aρa† − ½{a†a, ρ}).
    pub fn rhs(&self, rho: &DensityMatrix3<T>) -> DensityMatrix3<T> {
        let r = &rho.entries;
        let g = self.coupling;
        let half = lit::<T>(0.5) * self.decay;
        let i = Complex::new(T::zero(), T::one());
        let zero = Complex::new(T::zero(), T::zero());

        // H·ρ only mixes rows E0 and G1; ρ·H only mixes columns E0 and G1.
        let mut hr = [[zero; 3]; 3];
        let mut rh = [[zero; 3]; 3];
        for k in 0..3 {
            hr[E0][k] = r[G1][k] * g;
            hr[G1][k] = r[E0][k] * g;
            rh[k][E0] = r[k][G1] * g;
            rh[k][G1] = r[k][E0] * g;
        }

        let mut out = DensityMatrix3::zeros();
        for a in 0..3 {
            for b in 0..3 {
                let mut d = -i * (hr[a][b] - rh[a][b]);
                // a†a = |g,1⟩⟨g,1|
                let n_a = if a == G1 { T::one() } else { T::zero() };
                let n_b = if b == G1 { T::one() } else { T::zero() };
                d = d - r[a][b] * (half * (n_a + n_b));
                out.entries[a][b] = d;
            }
        }
        out.entries[G0][G0] = out.entries[G0][G0] + r[G1][G1] * self.decay;
        out
    }
}

/// Convenience wrapper around [`Generator::rhs`] with the unmutated model.
pub fn rhs<T: Real>(rho: &DensityMatrix3<T>, params: &ModelParams<T>) -> DensityMatrix3<T> {
    Generator::from_params(params).rhs(rho)
}

fn pack<T: Real>(rho: &DensityMatrix3<T>, out: &mut [T]) {
    for a in 0..3 {
        for b in 0..3 {
            let z = rho.entries[a][b];
            out[2 * (3 * a + b)] = z.re;
            out[2 * (3 * a + b) + 1] = z.im;
        }
    }
}

fn unpack<T: Real>(y: &[T]) -> DensityMatrix3<T> {
    let mut rho = DensityMatrix3::zeros();
    for a in 0..3 {
        for b in 0..3 {
            rho.entries[a][b] = Complex::new(y[2 * (3 * a + b)], y[2 * (3 * a + b) + 1]);
        }
    }
    rho
}

/// Integrates from |e,0⟩⟨e,0| and returns ρ at each of `samples`, which
/// must be sorted and lie in [0, t_end].
pub fn integrate<T: EigenReal>(config: &LindbladConfig<T>, samples: &[T]) -> Result<Vec<DensityMatrix3<T>>> {
    integrate_with(&Generator::from_params(&config.params), config, samples)
}

pub fn integrate_with<T: EigenReal>(
    generator: &Generator<T>,
    config: &LindbladConfig<T>,
    samples: &[T],
) -> Result<Vec<DensityMatrix3<T>>> {
    config.validate()?;
    let t_end = config.t_end.value();
    if let Some(&bad) = samples.iter().find(|&&s| !(s >= T::zero() && s <= t_end)) {
        return Err(Error::Domain(format!("sample time {bad} outside [0, {t_end}]")));
    }
    let mut y0 = vec![T::zero(); 18];
    pack(&DensityMatrix3::excited(), &mut y0);

    let cfg = AdaptiveConfig {
        tol: config.tol,
        initial_step: config.dt,
        max_step: num_traits::Float::max(t_end, config.dt),
    };
    let ys = integrate_sampled(
        |_, y, dy| {
            let d = generator.rhs(&unpack(y));
            pack(&d, dy);
        },
        T::zero(),
        &y0,
        samples,
        &cfg,
    )?;

    let check = num_traits::Float::max(lit::<T>(10.0) * config.tol, lit(CHECK_FLOOR));
    ys.iter()
        .zip(samples)
        .map(|(y, &tau)| {
            let rho = unpack(y);
            rho.check_with(check, check, check)
                .map_err(|e| Error::IntegrationFailure {
                    tau: tau.to_f64_lossy(),
                    reason: e.to_string(),
                })?;
            Ok(rho)
        })
        .collect()
}

/// `n` evenly spaced sample times on [0, t_end], both ends included.
pub fn uniform_samples<T: Real>(t_end: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![T::zero()],
        _ => {
            let last = T::from_usize_lossy(n - 1);
            (0..n)
                .map(|k| {
                    if k == n - 1 {
                        t_end
                    } else {
                        t_end * T::from_usize_lossy(k) / last
                    }
                })
                .collect()
        }
    }
}

/// 2|ρ_{e0,g1}|: the concurrence of the no-jump block.
pub fn block_concurrence<T: Real>(rho: &DensityMatrix3<T>) -> T {
    lit::<T>(2.0) * rho.coherence().norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(xi: f64) -> ModelParams<f64> {
        ModelParams::new(xi).unwrap()
    }

    fn run(xi: f64, t_end: f64, samples: &[f64]) -> Vec<DensityMatrix3<f64>> {
        let cfg = LindbladConfig::new(params(xi), RescaledTime::new(t_end).unwrap());
        integrate(&cfg, samples).unwrap()
    }

    #[test]
    fn excited_state_has_no_direct_loss() {
        let d = rhs(&DensityMatrix3::excited(), &params(2.0));
        assert_eq!(d.population(G0), 0.0);
        assert_eq!(d.population(E0), 0.0);
        // coherent flow only
        assert!(d.get(E0, G1).norm() > 0.0);
    }

    #[test]
    fn photon_decays_at_rate_four() {
        let d = rhs(&DensityMatrix3::diagonal([0.0, 1.0, 0.0]), &params(0.7));
        assert_eq!(d.population(G1), -4.0);
        assert_eq!(d.population(G0), 4.0);
    }

    #[test]
    fn generator_is_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mut psi = [Complex::new(0.0, 0.0); 3];
            for z in psi.iter_mut() {
                *z = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let mut rho = DensityMatrix3::zeros();
            for a in 0..3 {
                for b in 0..3 {
                    rho.entries[a][b] = psi[a] * psi[b].conj() / (norm * norm);
                }
            }
            let d = rhs(&rho, &params(rng.random_range(0.01..20.0)));
            assert!(d.trace().norm() < 1e-14);
        }
    }

    #[test]
    fn matches_analytic_at_half() {
        let rho = run(2.0, 0.5, &[0.5]);
        assert!((rho[0].population(E0) - 0.6597001533917017f64.powi(2)).abs() < 1e-8);
        assert!((block_concurrence(&rho[0]) - 0.7039095569054789).abs() < 1e-8);
    }

    #[test]
    fn coherence_phase_matches_no_jump_amplitudes() {
        let p = params(2.0);
        let rho = run(2.0, 1.0, &[0.3, 1.0]);
        for (r, &tau) in rho.iter().zip(&[0.3, 1.0]) {
            let psi = analytic::amplitudes(&p, RescaledTime::new(tau).unwrap());
            let expect = psi.c_e0 * psi.c_g1.conj();
            assert!((r.coherence() - expect).norm() < 1e-8);
        }
    }

    #[test]
    fn zero_time_returns_initial_state() {
        let rho = run(3.0, 0.0, &[0.0]);
        assert_eq!(rho[0], DensityMatrix3::excited());
    }

    #[test]
    fn agrees_with_analytic_concurrence_on_grid() {
        let samples = uniform_samples(6.0, 401);
        for xi in [0.2, 1.0, 5.0] {
            let p = params(xi);
            let rho = run(xi, 6.0, &samples);
            let worst = rho
                .iter()
                .zip(&samples)
                .map(|(r, &t)| (block_concurrence(r) - analytic::concurrence(&p, RescaledTime::new(t).unwrap())).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-6, "xi={xi} worst={worst:e}");
        }
    }

    #[test]
    fn sign_flip_leaves_populations_but_flips_coherence() {
        let p = params(2.0);
        let cfg = LindbladConfig::new(p, RescaledTime::new(0.5).unwrap());
        let good = integrate(&cfg, &[0.5]).unwrap()[0];
        let bad = integrate_with(&Generator::mutated(&p, Mutation::FlipCouplingSign), &cfg, &[0.5]).unwrap()[0];
        assert!((good.population(E0) - bad.population(E0)).abs() < 1e-9);
        assert!((good.coherence() + bad.coherence()).norm() < 1e-9);
        assert!(good.coherence().norm() > 0.1);
    }

    #[test]
    fn samples_outside_horizon_rejected() {
        let cfg = LindbladConfig::new(params(1.0), RescaledTime::new(1.0).unwrap());
        assert!(matches!(integrate(&cfg, &[0.5, 1.5]), Err(Error::Domain(_))));
    }

    #[test]
    fn tolerance_refinement_converges() {
        let samples = uniform_samples(6.0, 401);
        for xi in [0.2, 0.5, 1.0, 2.0] {
            let mut coarse = LindbladConfig::new(params(xi), RescaledTime::new(6.0).unwrap());
            coarse.tol = 1e-8;
            let mut fine = coarse;
            fine.tol = 1e-10;
            let a = integrate(&coarse, &samples).unwrap();
            let b = integrate(&fine, &samples).unwrap();
            for (x, y) in a.iter().zip(&b) {
                for i in 0..3 {
                    let d = (x.population(i) - y.population(i)).abs();
                    assert!(d < 10.0 * fine.tol, "xi={xi} diff={d:e}");
                }
            }
        }
    }
}
