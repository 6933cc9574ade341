use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::Result;
use crate::linalg::{frob, singular_values_desc};

use super::point::{GrassmannPoint, StiefelPoint};

/// Principal angles between two `k`-dimensional subspaces, ascending in
/// `[0, π/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAngles {
    angles: Vec<f64>,
}

impl PrincipalAngles {
    /// Sorts and clamps the given angles.
    pub fn new(mut angles: Vec<f64>) -> Self {
        for a in angles.iter_mut() {
            *a = a.clamp(0.0, FRAC_PI_2);
        }
        angles.sort_by(f64::total_cmp);
        Self { angles }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// `‖θ‖₂`, the Grassmann geodesic distance.
    pub fn norm(&self) -> f64 {
        self.angles.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    /// `‖sin θ‖₂`, the Grassmann chordal distance.
    pub fn sin_norm(&self) -> f64 {
        self.angles.iter().map(|t| t.sin().powi(2)).sum::<f64>().sqrt()
    }

    /// `λ_i = cos² θ_i`.
    pub fn cos_squared(&self) -> Vec<f64> {
        self.angles.iter().map(|t| t.cos().powi(2)).collect()
    }
}

/// Principal angles from the singular values of `Φ†Ψ`.
///
/// Small angles are taken from the sines (singular values of `Ψ − ΦΦ†Ψ`),
/// since `arccos` loses half the digits near 1.
pub fn principal_angles(p: &StiefelPoint, q: &StiefelPoint) -> Result<PrincipalAngles> {
    p.check_compatible(q)?;
    let overlap = p.frame().adjoint() * q.frame();
    let cosines = singular_values_desc(&overlap);
    let residual = q.frame() - p.frame() * &overlap;
    let mut sines = singular_values_desc(&residual);
    sines.reverse();
    let angles = cosines
        .iter()
        .zip(sines.iter())
        .map(|(&c, &s)| {
            let from_cos = c.clamp(0.0, 1.0).acos();
            if from_cos < FRAC_PI_4 {
                s.clamp(0.0, 1.0).asin()
            } else {
                from_cos
            }
        })
        .collect();
    Ok(PrincipalAngles::new(angles))
}

/// `‖Φ − Ψ‖_F`.
pub fn chordal_stiefel(p: &StiefelPoint, q: &StiefelPoint) -> Result<f64> {
    p.check_compatible(q)?;
    Ok(frob(&(p.frame() - q.frame())))
}

/// `‖sin θ‖₂ = ‖P_Φ − P_Ψ‖_F / √2`.
pub fn chordal_grassmann(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<f64> {
    Ok(principal_angles(p.representative(), q.representative())?.sin_norm())
}

/// `‖θ‖₂`.
pub fn geodesic_grassmann(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<f64> {
    Ok(principal_angles(p.representative(), q.representative())?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, CMat, C64};
    use crate::manifold::point::projector_distance;
    use crate::manifold::sampling::haar_grassmann;
    use crate::manifold::space::SpaceSpec;
    use std::f64::consts::SQRT_2;

    fn line(t: f64) -> GrassmannPoint {
        let f = CMat::from_row_slice(2, 1, &[C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)]);
        GrassmannPoint::new(StiefelPoint::new(f).unwrap()).unwrap()
    }

    #[test]
    fn lines_in_the_plane() {
        for t in [0.0, 1e-9, 0.2, 0.7, 1.3, FRAC_PI_2] {
            let (p, q) = (line(0.0), line(t));
            let th = principal_angles(p.representative(), q.representative()).unwrap();
            assert!((th.angles()[0] - t).abs() < 1e-15);
            assert!((geodesic_grassmann(&p, &q).unwrap() - t).abs() < 1e-15);
            assert!((chordal_grassmann(&p, &q).unwrap() - t.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn identical_points_have_zero_angles() {
        let p = haar_grassmann(SpaceSpec::grassmann(3, 8).unwrap(), 1).unwrap();
        let th = principal_angles(p.representative(), p.representative()).unwrap();
        assert!(th.angles().iter().all(|&a| a < 1e-14));
    }

    #[test]
    fn stiefel_chordal_examples() {
        let i2 = StiefelPoint::new(identity(2)).unwrap();
        let m = StiefelPoint::new(-identity(2)).unwrap();
        assert!((chordal_stiefel(&i2, &m).unwrap() - 2.0 * SQRT_2).abs() < 1e-15);
        let e1 = StiefelPoint::canonical(2, 1);
        let e2 = StiefelPoint::new(CMat::from_row_slice(2, 1, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)])).unwrap();
        assert!((chordal_stiefel(&e1, &e2).unwrap() - SQRT_2).abs() < 1e-15);
        assert_eq!(chordal_stiefel(&e1, &e1).unwrap(), 0.0);
    }

    #[test]
    fn chordal_matches_projector_distance() {
        let spec = SpaceSpec::grassmann(3, 7).unwrap();
        for seed in 0..30 {
            let p = haar_grassmann(spec, 2 * seed).unwrap();
            let q = haar_grassmann(spec, 2 * seed + 1).unwrap();
            let d = chordal_grassmann(&p, &q).unwrap();
            assert!((d - projector_distance(&p, &q) / SQRT_2).abs() < 1e-10);
        }
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let p = StiefelPoint::canonical(3, 1);
        let q = StiefelPoint::canonical(4, 1);
        assert!(principal_angles(&p, &q).is_err());
        assert!(chordal_stiefel(&p, &q).is_err());
    }
}
