//! Thin wrappers around nalgebra's Hermitian eigen-solver for the small
//! fixed-size matrices used here.

use nalgebra::{ComplexField, DMatrix, RealField};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Scalars that can drive nalgebra's decompositions.
pub trait EigenReal: Real + RealField {}
impl<T: Real + RealField> EigenReal for T {}

pub(crate) type Square<T, const N: usize> = [[Complex<T>; N]; N];

fn to_matrix<T: EigenReal, const N: usize>(m: &Square<T, N>) -> DMatrix<Complex<T>> {
    DMatrix::from_fn(N, N, |i, j| m[i][j])
}

fn dump<T: EigenReal, const N: usize>(m: &Square<T, N>) -> String {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|z| format!("{:+.6e}{:+.6e}i", z.re, z.im))
                .collect::<Vec<_>>()
                .join("  ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Eigenvalues (ascending) and column eigenvectors of a Hermitian matrix.
pub(crate) fn hermitian_eigen<T: EigenReal, const N: usize>(m: &Square<T, N>) -> Result<([T; N], Square<T, N>)> {
    let eig = nalgebra::SymmetricEigen::new(to_matrix(m));
    let mut order: Vec<usize> = (0..N).collect();
    let vals = eig.eigenvalues;
    if vals.iter().any(|v| !num_traits::Float::is_finite(*v)) {
        return Err(Error::Eigen {
            reason: "non-finite eigenvalue".into(),
            matrix: dump(m),
        });
    }
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).expect("finite"));
    let mut values = [T::zero(); N];
    let mut vectors = [[Complex::new(T::zero(), T::zero()); N]; N];
    for (k, &src) in order.iter().enumerate() {
        values[k] = vals[src];
        for (i, row) in vectors.iter_mut().enumerate() {
            row[k] = eig.eigenvectors[(i, src)];
        }
    }
    Ok((values, vectors))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub(crate) fn hermitian_eigenvalues<T: EigenReal, const N: usize>(m: &Square<T, N>) -> Result<[T; N]> {
    hermitian_eigen(m).map(|(v, _)| v)
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues in `[-clip, 0)`, and positive ones indistinguishable from
/// rounding noise of the largest, are treated as zero.
pub(crate) fn psd_sqrt<T: EigenReal, const N: usize>(m: &Square<T, N>, clip: T) -> Result<Square<T, N>> {
    let (vals, vecs) = hermitian_eigen(m)?;
    let zero = T::zero();
    let scale = vals.iter().fold(zero, |m, &v| if v > m { v } else { m });
    let noise = T::lit(64.0) * <T as num_traits::Float>::epsilon() * scale;
    let mut roots = [zero; N];
    for (r, &v) in roots.iter_mut().zip(vals.iter()) {
        if v < -clip {
            return Err(Error::Eigen {
                reason: format!("negative eigenvalue {v:e} below clipping threshold"),
                matrix: dump(m),
            });
        }
        *r = if v <= noise { zero } else { ComplexField::sqrt(v) };
    }
    let mut out = [[Complex::new(zero, zero); N]; N];
    for i in 0..N {
        for j in 0..N {
            out[i][j] = (0..N).fold(Complex::new(zero, zero), |acc, k| {
                acc + vecs[i][k] * vecs[j][k].conj() * roots[k]
            });
        }
    }
    Ok(out)
}

pub(crate) fn matmul<T: Real, const N: usize>(a: &Square<T, N>, b: &Square<T, N>) -> Square<T, N> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = [[zero; N]; N];
    for i in 0..N {
        for j in 0..N {
            let mut acc = zero;
            for k in 0..N {
                acc = acc + a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Singular values (descending) of a square complex matrix.
pub(crate) fn singular_values<T: EigenReal, const N: usize>(m: &Square<T, N>) -> Result<[T; N]> {
    let svd = nalgebra::SVD::new(to_matrix(m), false, false);
    let mut out = [T::zero(); N];
    for (o, v) in out.iter_mut().zip(svd.singular_values.iter()) {
        if !num_traits::Float::is_finite(*v) {
            return Err(Error::Eigen {
                reason: "non-finite singular value".into(),
                matrix: dump(m),
            });
        }
        *o = *v;
    }
    out.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(out)
}
