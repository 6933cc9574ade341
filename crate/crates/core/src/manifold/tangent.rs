//! Horizontal tangents `X = [[A, −B†], [B, 0]]` in `u(n)`.
//!
//! The metric is `⟨U, V⟩ = ½ Re tr U†V`, so `‖X‖² = ½‖A‖²_F + ‖B‖²_F`.
//! Tangents also have real coordinates in an orthonormal basis of the
//! horizontal space, laid out as: the `k` diagonal entries of `A`, then the
//! real and imaginary parts of the strict upper triangle of `A` (row-major),
//! then the real and imaginary parts of `B` (row-major). Grassmann tangents
//! have no `A` coordinates.

use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{frob2, max_abs_diff, CMat, C64};

use super::space::{Family, SpaceSpec};

/// Tolerance on `A† = −A`.
pub const SKEW_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalTangent {
    a: CMat,
    b: CMat,
    space: SpaceSpec,
}

impl HorizontalTangent {
    pub fn new(space: SpaceSpec, a: CMat, b: CMat) -> Result<Self> {
        let (k, n) = (space.k(), space.n());
        if a.shape() != (k, k) || b.shape() != (n - k, k) {
            return Err(Error::DimensionMismatch {
                expected: format!("A {k}x{k}, B {}x{k}", n - k),
                actual: format!("A {}x{}, B {}x{}", a.nrows(), a.ncols(), b.nrows(), b.ncols()),
            });
        }
        let skew = max_abs_diff(&a.adjoint(), &(-&a));
        if skew > SKEW_TOL {
            return Err(Error::NotHorizontal(format!("A is not skew-Hermitian (residual {skew:.3e})")));
        }
        if space.family() == Family::Grassmann && a.iter().any(|z| *z != C64::new(0.0, 0.0)) {
            return Err(Error::NotHorizontal("Grassmann tangents need A = 0".into()));
        }
        Ok(Self { a, b, space })
    }

    pub fn zero(space: SpaceSpec) -> Self {
        let (k, n) = (space.k(), space.n());
        Self { a: CMat::zeros(k, k), b: CMat::zeros(n - k, k), space }
    }

    /// A tangent with `A = 0`, valid on either family.
    pub fn from_b(space: SpaceSpec, b: CMat) -> Result<Self> {
        let k = space.k();
        Self::new(space, CMat::zeros(k, k), b)
    }

    pub fn a_block(&self) -> &CMat {
        &self.a
    }

    pub fn b_block(&self) -> &CMat {
        &self.b
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().chain(self.b.iter()).all(|z| *z == C64::new(0.0, 0.0))
    }

    /// Geodesic length `sqrt(½‖A‖² + ‖B‖²)`.
    pub fn norm(&self) -> f64 {
        (0.5 * frob2(&self.a) + frob2(&self.b)).sqrt()
    }

    /// Frobenius norm of the embedded `n × n` matrix, `sqrt(‖A‖² + 2‖B‖²)`.
    pub fn frobenius_norm(&self) -> f64 {
        (frob2(&self.a) + 2.0 * frob2(&self.b)).sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let f = C64::new(factor, 0.0);
        Self { a: &self.a * f, b: &self.b * f, space: self.space }
    }

    /// The skew-Hermitian `n × n` matrix `[[A, −B†], [B, 0]]`.
    pub fn embed(&self) -> CMat {
        let (k, n) = (self.space.k(), self.space.n());
        let mut x = CMat::zeros(n, n);
        x.view_mut((0, 0), (k, k)).copy_from(&self.a);
        if n > k {
            x.view_mut((k, 0), (n - k, k)).copy_from(&self.b);
            x.view_mut((0, k), (k, n - k)).copy_from(&(-self.b.adjoint()));
        }
        x
    }

    /// The `A`-only part (`Y` in the phase analysis), kept on the same space.
    pub fn a_part(&self) -> Self {
        Self { a: self.a.clone(), b: CMat::zeros(self.b.nrows(), self.b.ncols()), space: self.space }
    }

    /// The `B`-only part (`Z`).
    pub fn b_part(&self) -> Self {
        Self { a: CMat::zeros(self.a.nrows(), self.a.ncols()), b: self.b.clone(), space: self.space }
    }

    /// Coordinates in the orthonormal horizontal basis.
    pub fn coords(&self) -> Vec<f64> {
        let k = self.space.k();
        let mut c = Vec::with_capacity(self.space.real_dimension());
        if self.space.family() == Family::Stiefel {
            for j in 0..k {
                c.push(self.a[(j, j)].im / SQRT_2);
            }
            for j in 0..k {
                for l in j + 1..k {
                    c.push(self.a[(j, l)].re);
                    c.push(self.a[(j, l)].im);
                }
            }
        }
        for i in 0..self.b.nrows() {
            for j in 0..k {
                c.push(self.b[(i, j)].re);
                c.push(self.b[(i, j)].im);
            }
        }
        c
    }

    pub fn from_coords(space: SpaceSpec, coords: &[f64]) -> Result<Self> {
        let d = space.real_dimension();
        if coords.len() != d {
            return Err(Error::DimensionMismatch {
                expected: format!("{d} coordinates"),
                actual: coords.len().to_string(),
            });
        }
        let (k, n) = (space.k(), space.n());
        let mut a = CMat::zeros(k, k);
        let mut b = CMat::zeros(n - k, k);
        let mut it = coords.iter().copied();
        if space.family() == Family::Stiefel {
            for j in 0..k {
                a[(j, j)] = C64::new(0.0, SQRT_2 * it.next().unwrap());
            }
            for j in 0..k {
                for l in j + 1..k {
                    let z = C64::new(it.next().unwrap(), it.next().unwrap());
                    a[(j, l)] = z;
                    a[(l, j)] = -z.conj();
                }
            }
        }
        for i in 0..n - k {
            for j in 0..k {
                b[(i, j)] = C64::new(it.next().unwrap(), it.next().unwrap());
            }
        }
        Ok(Self { a, b, space })
    }

    /// Metric inner product `½ Re tr X†Y`.
    pub fn inner(&self, other: &Self) -> f64 {
        let dot = |x: &CMat, y: &CMat| x.iter().zip(y.iter()).map(|(p, q)| (p.conj() * q).re).sum::<f64>();
        0.5 * dot(&self.a, &other.a) + dot(&self.b, &other.b)
    }

    /// The coordinate basis, orthonormal in the metric.
    pub fn standard_basis(space: SpaceSpec) -> Vec<Self> {
        let d = space.real_dimension();
        (0..d)
            .map(|i| {
                let mut c = vec![0.0; d];
                c[i] = 1.0;
                Self::from_coords(space, &c).expect("length matches")
            })
            .collect()
    }

    /// Isotropic Gaussian direction on the horizontal space, normalized to
    /// `norm() == 1`.
    pub fn random_unit<R: Rng + ?Sized>(space: SpaceSpec, rng: &mut R) -> Self {
        loop {
            let c: Vec<f64> = (0..space.real_dimension()).map(|_| rng.sample(StandardNormal)).collect();
            let len = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len > 1e-300 {
                let unit: Vec<f64> = c.iter().map(|x| x / len).collect();
                return Self::from_coords(space, &unit).expect("length matches");
            }
        }
    }

    /// Random isotropic direction rescaled to the given geodesic length.
    pub fn random_with_norm<R: Rng + ?Sized>(space: SpaceSpec, norm: f64, rng: &mut R) -> Self {
        Self::random_unit(space, rng).scaled(norm)
    }

    /// Random isotropic direction rescaled so that `‖X‖_F = fnorm`.
    pub fn random_with_frobenius<R: Rng + ?Sized>(space: SpaceSpec, fnorm: f64, rng: &mut R) -> Self {
        let t = Self::random_unit(space, rng);
        let f = t.frobenius_norm();
        t.scaled(fnorm / f)
    }
}

/// Geodesic length of a horizontal tangent.
pub fn tangent_norm(t: &HorizontalTangent) -> f64 {
    t.norm()
}
