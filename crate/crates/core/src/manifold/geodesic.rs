use crate::error::{Error, Result};
use crate::linalg::{expm_skew_hermitian, identity, CMat, C64};

use super::point::StiefelPoint;
use super::tangent::HorizontalTangent;

fn check_dims(base: &StiefelPoint, tangent: &HorizontalTangent) -> Result<()> {
    let s = tangent.space();
    if base.n() != s.n() || base.k() != s.k() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{} base for tangent on {s}", s.n(), s.k()),
            actual: format!("{}x{}", base.n(), base.k()),
        });
    }
    Ok(())
}

/// Endpoint `Ψ̄ · exp(X) · [I; 0]` of the geodesic from `base` along `tangent`.
pub fn exp_point(base: &StiefelPoint, tangent: &HorizontalTangent) -> Result<StiefelPoint> {
    check_dims(base, tangent)?;
    if tangent.is_zero() {
        return Ok(base.clone());
    }
    let k = base.k();
    let e = expm_skew_hermitian(&tangent.embed());
    let head = e.columns(0, k).into_owned();
    let frame = if base.is_canonical() { head } else { base.completion() * head };
    Ok(StiefelPoint::from_frame_unchecked(frame))
}

/// `exp(Z)[I; 0]` for `Z = [[0, −B†], [B, 0]]` through the thin SVD
/// `B = V₁ S W₁†`: `[I − W₁(I − cos S)W₁†; V₁ sin S W₁†]`.
pub fn grassmann_exp_canonical(b: &CMat) -> CMat {
    let (m, k) = b.shape();
    let n = m + k;
    let mut out = CMat::zeros(n, k);
    if m == 0 {
        out.copy_from(&identity(k));
        return out;
    }
    let svd = b.clone().svd(true, true);
    let v1 = svd.u.expect("requested");
    let w1 = svd.v_t.expect("requested").adjoint();
    let s = &svd.singular_values;
    let r = s.len();
    let one_minus_cos =
        CMat::from_fn(r, r, |i, j| if i == j { C64::new(1.0 - s[i].cos(), 0.0) } else { C64::new(0.0, 0.0) });
    let sin = CMat::from_fn(r, r, |i, j| if i == j { C64::new(s[i].sin(), 0.0) } else { C64::new(0.0, 0.0) });
    let top = identity(k) - &w1 * one_minus_cos * w1.adjoint();
    let bottom = &v1 * sin * w1.adjoint();
    out.rows_mut(0, k).copy_from(&top);
    out.rows_mut(k, m).copy_from(&bottom);
    out
}

/// Closed-form endpoint for tangents with `A = 0`.
pub fn grassmann_exp_closed_form(base: &StiefelPoint, tangent: &HorizontalTangent) -> Result<StiefelPoint> {
    check_dims(base, tangent)?;
    if tangent.a_block().iter().any(|z| *z != C64::new(0.0, 0.0)) {
        return Err(Error::NotHorizontal("closed form needs A = 0".into()));
    }
    let head = grassmann_exp_canonical(tangent.b_block());
    let frame = if base.is_canonical() { head } else { base.completion() * head };
    Ok(StiefelPoint::from_frame_unchecked(frame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity_residual, max_abs_diff};
    use crate::manifold::sampling::{haar_stiefel, rng_for};
    use crate::manifold::space::SpaceSpec;
    use std::f64::consts::PI;

    #[test]
    fn zero_tangent_returns_base() {
        let spec = SpaceSpec::stiefel(2, 5).unwrap();
        let base = haar_stiefel(spec, 9).unwrap();
        let out = exp_point(&base, &HorizontalTangent::zero(spec)).unwrap();
        assert_eq!(out, base);
    }

    #[test]
    fn rotation_in_the_plane() {
        let spec = SpaceSpec::stiefel(1, 2).unwrap();
        for t in [0.0, 0.3, 1.0, 2.5] {
            let b = CMat::from_element(1, 1, C64::new(t, 0.0));
            let x = HorizontalTangent::from_b(spec, b).unwrap();
            let out = exp_point(&StiefelPoint::canonical(2, 1), &x).unwrap();
            assert!((out.frame()[(0, 0)] - C64::new(f64::cos(t), 0.0)).norm() < 1e-14);
            assert!((out.frame()[(1, 0)] - C64::new(f64::sin(t), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn scalar_phase() {
        let spec = SpaceSpec::unitary(1).unwrap();
        let a = CMat::from_element(1, 1, C64::new(0.0, PI));
        let x = HorizontalTangent::new(spec, a, CMat::zeros(0, 1)).unwrap();
        let out = exp_point(&StiefelPoint::canonical(1, 1), &x).unwrap();
        assert!((out.frame()[(0, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn closed_form_matches_exponential() {
        for (k, n) in [(1, 3), (2, 4), (2, 7), (3, 4)] {
            let spec = SpaceSpec::stiefel(k, n).unwrap();
            let mut rng = rng_for(17, (k * 100 + n) as u64);
            for i in 0..10 {
                let base = if i % 2 == 0 { StiefelPoint::canonical(n, k) } else { haar_stiefel(spec, i).unwrap() };
                let x = HorizontalTangent::random_with_norm(spec, 0.3 * i as f64, &mut rng).b_part();
                let e = exp_point(&base, &x).unwrap();
                let c = grassmann_exp_closed_form(&base, &x).unwrap();
                assert!(max_abs_diff(e.frame(), c.frame()) < 1e-10);
                assert!(identity_residual(&(e.frame().adjoint() * e.frame())) < 1e-11);
            }
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let spec = SpaceSpec::stiefel(1, 3).unwrap();
        let base = StiefelPoint::canonical(4, 1);
        assert!(matches!(exp_point(&base, &HorizontalTangent::zero(spec)), Err(Error::DimensionMismatch { .. })));
    }
}
