//! Concurrence of the unconditional qubit–mode state.
//!
//! The photonic mode is truncated to {|0⟩, |1⟩}, which makes the state a
//! two-qubit density matrix. Its Wootters concurrence reduces to 2|ρ_{e0,g1}|
//! on the model's state family, because the only coherence is between
//! |e,0⟩ and |g,1⟩ and |e,1⟩ is never populated.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, matmul, psd_sqrt, singular_values, EigenReal, Square};
use crate::model::{DensityMatrix3, E0, G0, G1, HERMITIAN_TOL, POSITIVITY_TOL, TRACE_TOL};
use crate::scalar::{lit, Real};

/// Largest |g,0⟩ coherence tolerated by [`xstate_concurrence`].
pub const FORM_TOL: f64 = 1e-8;
/// Eigenvalues of ρ in `[-CLIP, 0)` are clipped to zero before square roots.
pub const CLIP: f64 = 1e-9;

/// Row/column of |e,1⟩, |e,0⟩, |g,1⟩, |g,0⟩ in [`TwoQubitDensity`].
pub const Q_E1: usize = 0;
pub const Q_E0: usize = 1;
pub const Q_G1: usize = 2;
pub const Q_G0: usize = 3;

/// 4×4 density matrix over (|e,1⟩, |e,0⟩, |g,1⟩, |g,0⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDensity<T> {
    pub entries: [[Complex<T>; 4]; 4],
}

impl<T: Real> TwoQubitDensity<T> {
    pub fn zeros() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { entries: [[z; 4]; 4] }
    }

    /// Projector onto a (not necessarily normalized) pure state.
    pub fn pure(psi: [Complex<T>; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.entries[i][j] = psi[i] * psi[j].conj();
            }
        }
        m
    }

    pub fn diagonal(p: [T; 4]) -> Self {
        let mut m = Self::zeros();
        for (i, &pi) in p.iter().enumerate() {
            m.entries[i][i] = Complex::new(pi, T::zero());
        }
        m
    }

    pub fn trace(&self) -> Complex<T> {
        (0..4).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self.entries[i][i])
    }
}

impl<T: EigenReal> TwoQubitDensity<T> {
    pub fn check(&self) -> Result<()> {
        let mut herm = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                let d = (self.entries[i][j] - self.entries[j][i].conj()).norm();
                if d > herm {
                    herm = d;
                }
            }
        }
        if herm > lit(HERMITIAN_TOL) {
            return Err(Error::Invariant(format!("two-qubit state not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        let one = T::one();
        let tol: T = lit(TRACE_TOL);
        if tr.re - one > tol || one - tr.re > tol || tr.im > tol || -tr.im > tol {
            return Err(Error::Invariant(format!("trace {} + {}i differs from 1", tr.re, tr.im)));
        }
        let min = hermitian_eigenvalues(&self.entries)?[0];
        if min < -lit::<T>(POSITIVITY_TOL) {
            return Err(Error::Invariant(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }
}

/// Places the 3×3 state into the two-qubit space; |e,1⟩ stays empty.
pub fn embed<T: Real>(rho3: &DensityMatrix3<T>) -> TwoQubitDensity<T> {
    let map = [(E0, Q_E0), (G1, Q_G1), (G0, Q_G0)];
    let mut out = TwoQubitDensity::zeros();
    for &(i3, i4) in &map {
        for &(j3, j4) in &map {
            out.entries[i4][j4] = rho3.get(i3, j3);
        }
    }
    out
}

/// σy⊗σy in the (|e,1⟩, |e,0⟩, |g,1⟩, |g,0⟩) ordering: relabelling both
/// factors flips the sign of each σy, leaving the product unchanged.
fn spin_flip<T: Real>(m: &Square<T, 4>) -> Square<T, 4> {
    const SIGNS: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
    let z = Complex::new(T::zero(), T::zero());
    let mut y = [[z; 4]; 4];
    for (i, row) in y.iter_mut().enumerate() {
        row[3 - i] = Complex::new(lit(SIGNS[i]), T::zero());
    }
    matmul(&matmul(&y, m), &y)
}

/// Wootters concurrence max(0, √μ₁ − √μ₂ − √μ₃ − √μ₄), μ the descending
/// eigenvalues of ρ·ρ̃ with ρ̃ = (σy⊗σy)ρ*(σy⊗σy).
///
/// The √μᵢ are taken as the singular values of √ρ·(σy⊗σy)·√ρ*, whose Gram
/// matrix is the Hermitian R = √ρ ρ̃ √ρ. This avoids square roots of
/// eigenvalues that are zero up to rounding.
pub fn wootters_concurrence<T: EigenReal>(rho: &TwoQubitDensity<T>) -> Result<T> {
    let root = psd_sqrt(&rho.entries, lit(CLIP))?;
    let mut root_conj = root;
    for row in root_conj.iter_mut() {
        for z in row.iter_mut() {
            *z = z.conj();
        }
    }
    let a = matmul(&root, &spin_flip(&root_conj));
    let s = singular_values(&a)?;
    let c = s[0] - s[1] - s[2] - s[3];
    Ok(if c > T::zero() { c } else { T::zero() })
}

/// Concurrence of a model-form state: 2|ρ_{e0,g1}|.
///
/// Fails when |g,0⟩ carries coherences, since the shortcut is then invalid.
pub fn xstate_concurrence<T: Real>(rho3: &DensityMatrix3<T>) -> Result<T> {
    for k in [E0, G1] {
        let worst = rho3.get(k, G0).norm().max(rho3.get(G0, k).norm());
        if worst > lit(FORM_TOL) {
            return Err(Error::FormViolation(format!(
                "|g,0> coherence of magnitude {worst:e} present"
            )));
        }
    }
    Ok(lit::<T>(2.0) * rho3.coherence().norm())
}
