//! Haar-distributed frames and reproducible random streams.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

use super::point::{GrassmannPoint, StiefelPoint};
use super::space::SpaceSpec;

/// Independent stream number `index` under `seed`. Parallel sweeps draw sample
/// `i` from `rng_for(seed, i)`, so results do not depend on scheduling.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Matrix of i.i.d. standard complex Gaussians, `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
    })
}

/// Haar frame from a thin QR of a Gaussian matrix, with column phases fixed so
/// that `R` has a positive real diagonal.
pub fn haar_frame<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<CMat> {
    if k == 0 || k > n {
        return Err(Error::InvalidSpec(format!("cannot draw a {n}x{k} frame")));
    }
    loop {
        let g = complex_gaussian(n, k, rng);
        let qr = g.qr();
        let r = qr.r();
        if (0..k).any(|j| r[(j, j)].norm() < 1e-300) {
            continue;
        }
        let mut q = qr.q();
        for j in 0..k {
            let d = r[(j, j)];
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
        return Ok(q);
    }
}

pub fn haar_stiefel_with<R: Rng + ?Sized>(spec: SpaceSpec, rng: &mut R) -> Result<StiefelPoint> {
    Ok(StiefelPoint::from_frame_unchecked(haar_frame(spec.n(), spec.k(), rng)?))
}

/// Haar-distributed point of `V_{k,n}` (or a Haar representative of a
/// Grassmann point), deterministic in `seed`.
pub fn haar_stiefel(spec: SpaceSpec, seed: u64) -> Result<StiefelPoint> {
    haar_stiefel_with(spec, &mut rng_for(seed, 0))
}

pub fn haar_grassmann_with<R: Rng + ?Sized>(spec: SpaceSpec, rng: &mut R) -> Result<GrassmannPoint> {
    Ok(GrassmannPoint::from_representative_unchecked(haar_stiefel_with(spec, rng)?))
}

pub fn haar_grassmann(spec: SpaceSpec, seed: u64) -> Result<GrassmannPoint> {
    haar_grassmann_with(spec, &mut rng_for(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity_residual;
    use crate::manifold::point::projector_residuals;

    #[test]
    fn scalar_frame_has_unit_modulus() {
        let spec = SpaceSpec::unitary(1).unwrap();
        for seed in 0..20 {
            let p = haar_stiefel(spec, seed).unwrap();
            assert!((p.frame()[(0, 0)].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn frames_are_orthonormal_and_reproducible() {
        for (k, n) in [(1, 2), (2, 4), (3, 3), (4, 16), (8, 64)] {
            let spec = SpaceSpec::stiefel(k, n).unwrap();
            let p = haar_stiefel(spec, 42).unwrap();
            assert!(identity_residual(&(p.frame().adjoint() * p.frame())) < 1e-12);
            assert_eq!(p, haar_stiefel(spec, 42).unwrap());
            assert_ne!(p, haar_stiefel(spec, 43).unwrap());
        }
    }

    #[test]
    fn sampled_projectors_satisfy_identities() {
        let spec = SpaceSpec::grassmann(3, 7).unwrap();
        for seed in 0..50 {
            let p = haar_grassmann(spec, seed).unwrap();
            let res = projector_residuals(&p.projector(), 3);
            assert!(res.iter().all(|&r| r < 1e-10), "{res:?}");
        }
    }

    #[test]
    fn streams_differ_by_index() {
        let spec = SpaceSpec::stiefel(2, 3).unwrap();
        let a = haar_stiefel_with(spec, &mut rng_for(5, 0)).unwrap();
        let b = haar_stiefel_with(spec, &mut rng_for(5, 1)).unwrap();
        assert_ne!(a, b);
    }
}
