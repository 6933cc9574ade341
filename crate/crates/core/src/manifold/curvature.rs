//! Sectional and Ricci curvature of the normal homogeneous metric.
//!
//! For horizontal `X, Y` the curvature form is
//! `¼‖[X,Y]‖² + ¾‖[X,Y]^∥‖²` with `‖M‖² = ½‖M‖²_F`, where `^∥` keeps the
//! isotropy-algebra blocks: the lower-right `(n−k)` block on `V_{k,n}`, and
//! additionally the upper-left `k` block on `G_{k,n}`.

use crate::error::{Error, Result};
use crate::linalg::{commutator, frob2, CMat};

use super::space::{Family, SpaceSpec};
use super::tangent::HorizontalTangent;

const ZERO_NORM: f64 = 1e-14;
/// Tolerance on the orthonormality of a basis handed to [`ricci_diagonal`].
pub const BASIS_TOL: f64 = 1e-8;

fn check_space(spec: SpaceSpec, t: &HorizontalTangent) -> Result<()> {
    if t.space() != spec {
        return Err(Error::DimensionMismatch { expected: spec.to_string(), actual: t.space().to_string() });
    }
    Ok(())
}

fn vertical_norm2(spec: SpaceSpec, m: &CMat) -> f64 {
    let (k, n) = (spec.k(), spec.n());
    let lower = frob2(&m.view((k, k), (n - k, n - k)).into_owned());
    match spec.family() {
        Family::Stiefel => lower,
        Family::Grassmann => lower + frob2(&m.view((0, 0), (k, k)).into_owned()),
    }
}

/// The curvature form evaluated on `X, Y` as given, with no normalization.
/// Equals the sectional curvature when `X, Y` are orthonormal.
pub fn curvature_form(spec: SpaceSpec, x: &HorizontalTangent, y: &HorizontalTangent) -> Result<f64> {
    check_space(spec, x)?;
    check_space(spec, y)?;
    let c = commutator(&x.embed(), &y.embed());
    Ok(0.25 * 0.5 * frob2(&c) + 0.75 * 0.5 * vertical_norm2(spec, &c))
}

/// Sectional curvature of the plane spanned by `x` and `y`.
///
/// The pair is orthonormalized (Gram–Schmidt in the metric) first, so the
/// result depends only on the plane.
pub fn sectional_curvature(spec: SpaceSpec, x: &HorizontalTangent, y: &HorizontalTangent) -> Result<f64> {
    check_space(spec, x)?;
    check_space(spec, y)?;
    let (nx, ny) = (x.norm(), y.norm());
    if nx < ZERO_NORM || ny < ZERO_NORM {
        return Err(Error::DegenerateInput(format!("tangent norms {nx:e}, {ny:e}")));
    }
    let e1 = x.scaled(1.0 / nx);
    let proj = e1.inner(y);
    let rest = HorizontalTangent::from_coords(
        spec,
        &y.coords().iter().zip(e1.coords()).map(|(b, a)| b - proj * a).collect::<Vec<_>>(),
    )?;
    let nr = rest.norm();
    if nr < ZERO_NORM * ny.max(1.0) {
        return Err(Error::DegenerateInput("tangents are parallel".into()));
    }
    curvature_form(spec, &e1, &rest.scaled(1.0 / nr))
}

/// `ric(e_i, e_i) = Σ_{j≠i} K(e_i, e_j)` over an orthonormal horizontal basis.
pub fn ricci_diagonal(spec: SpaceSpec, basis: &[HorizontalTangent]) -> Result<Vec<f64>> {
    let d = spec.real_dimension();
    if basis.len() != d {
        return Err(Error::DimensionMismatch {
            expected: format!("{d} basis vectors"),
            actual: basis.len().to_string(),
        });
    }
    for t in basis {
        check_space(spec, t)?;
    }
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (x.inner(y) - target).abs();
            if dev > BASIS_TOL {
                return Err(Error::DegenerateInput(format!("basis not orthonormal at ({i},{j}): {dev:e}")));
            }
        }
    }
    let embedded: Vec<CMat> = basis.iter().map(HorizontalTangent::embed).collect();
    Ok((0..d)
        .map(|i| {
            (0..d)
                .filter(|&j| j != i)
                .map(|j| {
                    let c = commutator(&embedded[i], &embedded[j]);
                    0.125 * frob2(&c) + 0.375 * vertical_norm2(spec, &c)
                })
                .sum()
        })
        .collect())
}
