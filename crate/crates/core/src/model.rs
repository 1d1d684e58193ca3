//! Domain types: dimensionless parameters, rescaled time, the no-jump
//! amplitudes and the unconditional qutrit-like density matrix.
//!
//! Everything downstream works in the dimensionless pair (ξ, τ) with
//! ξ = 4λ₀/κ and τ = κt/4. Physical rates only appear at the boundary,
//! always carrying an explicit [`FrequencyUnit`].

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, EigenReal};
use crate::scalar::{lit, Real};

/// Basis index of |e,0⟩.
pub const E0: usize = 0;
/// Basis index of |g,1⟩.
pub const G1: usize = 1;
/// Basis index of |g,0⟩.
pub const G0: usize = 2;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-12;
const CONSISTENCY_TOL: f64 = 1e-12;

/// Unit attached to a physical rate. Never inferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyUnit {
    /// Angular frequency in rad/s.
    RadPerSecond,
    /// Angular frequency in rad/µs (numerically equal to "MHz" when the
    /// rate is quoted without a 2π).
    RadPerMicrosecond,
    /// Cyclic frequency in MHz; the angular value is 2π times larger.
    MegahertzCyclic,
}

/// Physical linewidth and resonant coupling, in a common unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalRates<T> {
    pub kappa: T,
    pub lambda0: T,
    pub unit: FrequencyUnit,
}

/// Dimensionless reservoir/coupling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    xi: T,
    physical: Option<PhysicalRates<T>>,
}

impl<T: Real> ModelParams<T> {
    /// Parameters from the coupling ratio ξ alone.
    pub fn new(xi: T) -> Result<Self> {
        if !(xi > T::zero()) || !xi.is_finite() {
            return Err(Error::Domain(format!("xi must be positive and finite, got {xi}")));
        }
        Ok(Self { xi, physical: None })
    }

    /// Parameters carrying both ξ and the physical rates it came from.
    pub fn with_physical(xi: T, physical: PhysicalRates<T>) -> Result<Self> {
        let p = Self::new(xi)?;
        let implied = lit::<T>(4.0) * physical.lambda0 / physical.kappa;
        if ((implied - xi) / xi).abs() > lit(CONSISTENCY_TOL) {
            return Err(Error::Invariant(format!(
                "xi = {xi} inconsistent with 4*lambda0/kappa = {implied}"
            )));
        }
        Ok(Self {
            physical: Some(physical),
            ..p
        })
    }

    #[inline]
    pub fn xi(&self) -> T {
        self.xi
    }

    pub fn physical(&self) -> Option<&PhysicalRates<T>> {
        self.physical.as_ref()
    }
}

/// Builds [`ModelParams`] from a linewidth κ and resonant coupling λ₀.
pub fn params_from_physical<T: Real>(kappa: T, lambda0: T, unit: FrequencyUnit) -> Result<ModelParams<T>> {
    if !(kappa > T::zero()) || !(lambda0 > T::zero()) {
        return Err(Error::Domain(format!(
            "kappa and lambda0 must be positive, got kappa = {kappa}, lambda0 = {lambda0}"
        )));
    }
    let xi = lit::<T>(4.0) * lambda0 / kappa;
    ModelParams::with_physical(xi, PhysicalRates { kappa, lambda0, unit })
}

/// Dimensionless time τ = κt/4.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct RescaledTime<T>(T);

impl<T: Real> RescaledTime<T> {
    pub fn new(tau: T) -> Result<Self> {
        if !(tau >= T::zero()) || !tau.is_finite() {
            return Err(Error::Domain(format!("tau must be non-negative and finite, got {tau}")));
        }
        Ok(Self(tau))
    }

    pub fn zero() -> Self {
        Self(T::zero())
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }
}

/// τ = κt/4. `t` must be in the reciprocal of κ's unit.
pub fn tau_from_time<T: Real>(t: T, kappa: T) -> Result<RescaledTime<T>> {
    if !(kappa > T::zero()) {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    if !(t >= T::zero()) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    RescaledTime::new(kappa * t / lit(4.0))
}

/// Amplitudes of the no-jump wavefunction on |e,0⟩ and |g,1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureAmplitudes<T> {
    pub c_e0: Complex<T>,
    pub c_g1: Complex<T>,
}

impl<T: Real> PureAmplitudes<T> {
    pub fn new(c_e0: Complex<T>, c_g1: Complex<T>) -> Self {
        Self { c_e0, c_g1 }
    }

    /// The initial state |e,0⟩.
    pub fn excited() -> Self {
        Self::new(Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()))
    }

    /// ⟨ψ|ψ⟩, the no-jump survival probability.
    pub fn norm_sqr(&self) -> T {
        self.c_e0.norm_sqr() + self.c_g1.norm_sqr()
    }

    /// 2|c_e0||c_g1|.
    pub fn concurrence(&self) -> T {
        lit::<T>(2.0) * self.c_e0.norm() * self.c_g1.norm()
    }

    pub fn check(&self) -> Result<()> {
        let n = self.norm_sqr();
        if !n.is_finite() || n > T::one() + lit(NORM_TOL) {
            return Err(Error::Invariant(format!("no-jump norm {n} exceeds 1")));
        }
        Ok(())
    }
}

impl PureAmplitudes<f64> {
    /// A random sub-normalized no-jump state: norm², the split between the
    /// two amplitudes and both phases drawn uniformly.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let norm: f64 = rng.random();
        let share: f64 = rng.random();
        let (pa, pb): (f64, f64) = (
            rng.random_range(0.0..std::f64::consts::TAU),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        let r = norm.sqrt();
        Self::new(
            Complex::from_polar(r * share.sqrt(), pa),
            Complex::from_polar(r * (1.0 - share).sqrt(), pb),
        )
    }
}

/// 3×3 density matrix over (|e,0⟩, |g,1⟩, |g,0⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3<T> {
    pub entries: [[Complex<T>; 3]; 3],
}

impl<T: Real> DensityMatrix3<T> {
    pub fn zeros() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { entries: [[z; 3]; 3] }
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(p: [T; 3]) -> Self {
        let mut m = Self::zeros();
        for (i, &pi) in p.iter().enumerate() {
            m.entries[i][i] = Complex::new(pi, T::zero());
        }
        m
    }

    /// |e,0⟩⟨e,0|.
    pub fn excited() -> Self {
        Self::diagonal([T::one(), T::zero(), T::zero()])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[i][j]
    }

    pub fn population(&self, i: usize) -> T {
        self.entries[i][i].re
    }

    /// ρ_{e0,g1}.
    pub fn coherence(&self) -> Complex<T> {
        self.entries[E0][G1]
    }

    pub fn trace(&self) -> Complex<T> {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2]
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.entries[i][j] - self.entries[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Hermiticity and unit-trace part of the invariant check.
    pub fn check_structure(&self, hermitian_tol: T, trace_tol: T) -> Result<()> {
        let herm = self.hermiticity_error();
        if !(herm <= hermitian_tol) {
            return Err(Error::Invariant(format!(
                "density matrix not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if !((tr.re - T::one()).abs() <= trace_tol) || !(tr.im.abs() <= trace_tol) {
            return Err(Error::Invariant(format!("trace {} + {}i differs from 1", tr.re, tr.im)));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let mut out = *self;
        for row in out.entries.iter_mut() {
            for z in row.iter_mut() {
                *z = f(*z);
            }
        }
        out
    }
}

impl<T: EigenReal> DensityMatrix3<T> {
    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Result<[T; 3]> {
        hermitian_eigenvalues(&self.hermitian_part())
    }

    fn hermitian_part(&self) -> [[Complex<T>; 3]; 3] {
        let half = lit::<T>(0.5);
        let mut h = self.entries;
        for (i, row) in h.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = (self.entries[i][j] + self.entries[j][i].conj()) * half;
            }
        }
        h
    }

    /// Checks Hermiticity, unit trace and positivity at the given tolerances.
    pub fn check_with(&self, hermitian_tol: T, trace_tol: T, positivity_tol: T) -> Result<()> {
        self.check_structure(hermitian_tol, trace_tol)?;
        let min = self.eigenvalues()?[0];
        if !(min >= -positivity_tol) {
            return Err(Error::Invariant(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn check(&self) -> Result<()> {
        self.check_with(lit(HERMITIAN_TOL), lit(TRACE_TOL), lit(POSITIVITY_TOL))
    }
}

/// Unconditional state: the no-jump projector plus the jump weight on |g,0⟩.
///
/// The jump branch carries a photon in the Markovian reservoir, so it is
/// orthogonal to the no-jump branch and contributes no coherences.
pub fn pure_to_density<T: Real>(psi: &PureAmplitudes<T>) -> Result<DensityMatrix3<T>> {
    psi.check()?;
    let amps = [psi.c_e0, psi.c_g1];
    let mut rho = DensityMatrix3::zeros();
    for i in 0..2 {
        for j in 0..2 {
            rho.entries[i][j] = amps[i] * amps[j].conj();
        }
    }
    // 1 - <psi|psi> written against the diagonal actually stored, so the
    // trace is exactly one up to a single rounding.
    let lost = T::one() - (rho.entries[E0][E0].re + rho.entries[G1][G1].re);
    rho.entries[G0][G0] = Complex::new(lost.max(T::zero()), T::zero());
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn physical_params() {
        let p = params_from_physical(5.0, 1.25, FrequencyUnit::RadPerMicrosecond).unwrap();
        assert_abs_diff_eq!(p.xi(), 1.0, epsilon = 1e-15);
        assert_eq!(p.physical().unwrap().unit, FrequencyUnit::RadPerMicrosecond);
        let p = params_from_physical(5.0, 2.5, FrequencyUnit::RadPerSecond).unwrap();
        assert_abs_diff_eq!(p.xi(), 2.0, epsilon = 1e-15);
        assert!(matches!(
            params_from_physical(0.0, 1.0, FrequencyUnit::RadPerSecond),
            Err(Error::Domain(_))
        ));
        assert!(params_from_physical(1.0, -1.0, FrequencyUnit::RadPerSecond).is_err());
    }

    #[test]
    fn inconsistent_physical_rates_rejected() {
        let rates = PhysicalRates {
            kappa: 5.0,
            lambda0: 2.5,
            unit: FrequencyUnit::MegahertzCyclic,
        };
        assert!(ModelParams::with_physical(2.0, rates).is_ok());
        assert!(matches!(
            ModelParams::with_physical(2.1, rates),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn xi_must_be_positive() {
        assert!(ModelParams::new(0.0).is_err());
        assert!(ModelParams::new(-1.0).is_err());
        assert!(ModelParams::new(f64::NAN).is_err());
        assert!(ModelParams::new(1e-3f32).is_ok());
    }

    #[test]
    fn rescaled_time() {
        assert_eq!(tau_from_time(0.0, 3.0).unwrap().value(), 0.0);
        let kappa = 2.7;
        assert_abs_diff_eq!(tau_from_time(4.0 / kappa, kappa).unwrap().value(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tau_from_time(0.8, 5.0).unwrap().value(), 1.0, epsilon = 1e-15);
        assert!(tau_from_time(-0.1, 5.0).is_err());
        assert!(tau_from_time(1.0, 0.0).is_err());
        assert!(RescaledTime::new(-1e-9).is_err());
    }

    #[test]
    fn density_examples() {
        let rho = pure_to_density(&PureAmplitudes::excited()).unwrap();
        assert_eq!(rho, DensityMatrix3::diagonal([1.0, 0.0, 0.0]));

        let rho = pure_to_density(&PureAmplitudes::new(c(0.0, 0.0), c(0.0, 0.0))).unwrap();
        assert_eq!(rho, DensityMatrix3::diagonal([0.0, 0.0, 1.0]));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho = pure_to_density(&PureAmplitudes::new(c(s, 0.0), c(0.0, -s))).unwrap();
        assert_abs_diff_eq!(rho.population(E0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.population(G1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.population(G0), 0.0, epsilon = 1e-15);
        // (|e0> - i|g1>)/sqrt2  =>  rho_{e0,g1} = c_e0 * conj(c_g1) = i/2
        assert_abs_diff_eq!(rho.coherence().im, 0.5, epsilon = 1e-15);
        let ev = rho.eigenvalues().unwrap();
        assert_abs_diff_eq!(ev[2], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn overnormalized_amplitudes_rejected() {
        let psi = PureAmplitudes::new(c(0.9, 0.0), c(0.5, 0.0));
        assert!(matches!(pure_to_density(&psi), Err(Error::Invariant(_))));
    }

    #[test]
    fn check_catches_bad_states() {
        let mut rho = DensityMatrix3::diagonal([0.5, 0.5, 0.0]);
        assert!(rho.check().is_ok());
        rho.entries[E0][G1] = c(0.6, 0.0);
        rho.entries[G1][E0] = c(0.6, 0.0);
        assert!(rho.check().is_err(), "eigenvalue -0.1 must be rejected");
        let rho = DensityMatrix3::diagonal([0.5, 0.4, 0.0]);
        assert!(rho.check().is_err());
        let mut rho = DensityMatrix3::diagonal([0.5, 0.5, 0.0]);
        rho.entries[E0][G1] = c(0.1, 0.0);
        assert!(rho.check().is_err());
    }

    fn amplitudes() -> impl Strategy<Value = PureAmplitudes<f64>> {
        (
            0.0..1.0f64,
            0.0..1.0f64,
            0.0..std::f64::consts::TAU,
            0.0..std::f64::consts::TAU,
        )
            .prop_map(|(norm, share, pa, pb)| {
                let r = norm.sqrt();
                let (a, b) = (r * share.sqrt(), r * (1.0 - share).sqrt());
                PureAmplitudes::new(Complex::from_polar(a, pa), Complex::from_polar(b, pb))
            })
    }

    proptest! {
        #[test]
        fn density_structure(psi in amplitudes()) {
            let rho = pure_to_density(&psi).unwrap();
            let tr = rho.trace();
            prop_assert!((tr.re - 1.0).abs() < 1e-12 && tr.im == 0.0);

            let n = psi.norm_sqr();
            let mut expected = [n, 0.0, 1.0 - n];
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let ev = rho.eigenvalues().unwrap();
            for k in 0..3 {
                prop_assert!((ev[k] - expected[k]).abs() < 1e-10);
            }

            let amps = [psi.c_e0, psi.c_g1];
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((rho.get(i, j) - amps[i] * amps[j].conj()).norm() < 1e-12);
                }
                prop_assert_eq!(rho.get(i, G0), Complex::new(0.0, 0.0));
                prop_assert_eq!(rho.get(G0, i), Complex::new(0.0, 0.0));
            }
        }
    }
}
