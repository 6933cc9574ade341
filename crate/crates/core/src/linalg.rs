//! Small dense complex linear-algebra helpers on top of `nalgebra`.
//!
//! Everything here works on [`CMat`], a dynamically sized complex matrix.
//! The exponential and logarithm exploit normality: skew-Hermitian inputs go
//! through a Hermitian eigendecomposition, unitary inputs through a complex
//! Schur form (diagonal up to roundoff for normal matrices).

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Squared Frobenius norm.
pub fn frob2(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn frob(m: &CMat) -> f64 {
    frob2(m).sqrt()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation of `m` from the identity.
pub fn identity_residual(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for (j, col) in m.column_iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((z - target).norm());
        }
    }
    worst
}

/// `(U - U†)/2`, the skew-Hermitian part.
pub fn skew_part(m: &CMat) -> CMat {
    (m - m.adjoint()) * C64::new(0.5, 0.0)
}

/// `(U + U†)/2`, the Hermitian part.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn commutator(x: &CMat, y: &CMat) -> CMat {
    x * y - y * x
}

/// Matrix exponential of a skew-Hermitian matrix.
///
/// Writes `X = iH` with `H` Hermitian, diagonalizes `H = U diag(λ) U†` and
/// returns `U diag(e^{iλ}) U†`. Only the skew-Hermitian part of `x` is used.
pub fn expm_skew_hermitian(x: &CMat) -> CMat {
    let n = x.nrows();
    if n == 0 {
        return zeros(0, 0);
    }
    let h = hermitian_part(&(x * (-I)));
    let eig = SymmetricEigen::new(h);
    let u = eig.eigenvectors;
    let phases = DVector::from_iterator(n, eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, l)));
    let scaled = u.clone() * CMat::from_diagonal(&phases);
    scaled * u.adjoint()
}

/// Principal logarithm of a unitary matrix, returned as a skew-Hermitian matrix.
///
/// Eigenvalue phases are taken in `(-π, π]`.
pub fn log_unitary(v: &CMat) -> Result<CMat> {
    if v.nrows() != v.ncols() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", v.nrows(), v.ncols()),
        });
    }
    let n = v.nrows();
    if n == 0 {
        return Ok(zeros(0, 0));
    }
    let resid = identity_residual(&(v.adjoint() * v));
    if resid > 1e-10 {
        return Err(Error::NotUnitary(resid));
    }
    let (q, t) = Schur::new(v.clone()).unpack();
    let logs = DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let mut phase = t[(i, i)].arg();
            if phase <= -PI {
                phase += 2.0 * PI;
            }
            I * phase
        }),
    );
    let l = q.clone() * CMat::from_diagonal(&logs) * q.adjoint();
    Ok(skew_part(&l))
}

/// Singular values sorted in decreasing order.
pub fn singular_values_desc(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Orthonormal basis of the orthogonal complement of the column span of a
/// frame with orthonormal columns, as an `n × (n-k)` matrix.
pub fn orthonormal_complement(frame: &CMat) -> CMat {
    let n = frame.nrows();
    let k = frame.ncols();
    if k == n {
        return zeros(n, 0);
    }
    let proj = identity(n) - frame * frame.adjoint();
    let eig = SymmetricEigen::new(hermitian_part(&proj));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let cols: Vec<_> = order[..n - k].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    CMat::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = expm_skew_hermitian(&zeros(3, 3));
        assert!(identity_residual(&e) < 1e-15);
    }

    #[test]
    fn exp_of_plane_rotation() {
        let t = 0.7;
        let x = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(-t, 0.0), c(t, 0.0), c(0.0, 0.0)]);
        let e = expm_skew_hermitian(&x);
        assert!((e[(0, 0)] - c(t.cos(), 0.0)).norm() < 1e-14);
        assert!((e[(1, 0)] - c(t.sin(), 0.0)).norm() < 1e-14);
        assert!((e[(0, 1)] - c(-t.sin(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn scalar_phase_exp_and_log() {
        let x = CMat::from_element(1, 1, c(0.0, PI));
        let e = expm_skew_hermitian(&x);
        assert!((e[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);

        let v = CMat::from_element(1, 1, c(0.0, 1.0));
        let l = log_unitary(&v).unwrap();
        assert!((l[(0, 0)] - c(0.0, PI / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn log_of_identity_is_zero() {
        let l = log_unitary(&identity(4)).unwrap();
        assert!(frob(&l) < 1e-14);
    }

    #[test]
    fn log_rejects_non_unitary() {
        let m = CMat::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(log_unitary(&m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn complement_is_orthonormal_and_orthogonal() {
        let s = 0.5f64.sqrt();
        let frame = CMat::from_row_slice(3, 1, &[c(s, 0.0), c(0.0, s), c(0.0, 0.0)]);
        let comp = orthonormal_complement(&frame);
        assert_eq!(comp.ncols(), 2);
        assert!(identity_residual(&(comp.adjoint() * &comp)) < 1e-13);
        assert!(frob(&(frame.adjoint() * &comp)) < 1e-13);
    }
}
