//! Points, tangents, geodesics, distances and curvature on complex Stiefel
//! and Grassmann manifolds.

pub mod curvature;
pub mod distance;
pub mod geodesic;
pub mod point;
pub mod sampling;
pub mod space;
pub mod tangent;

pub use crate::linalg::log_unitary;
pub use curvature::{curvature_form, ricci_diagonal, sectional_curvature};
pub use distance::{chordal_grassmann, chordal_stiefel, geodesic_grassmann, principal_angles, PrincipalAngles};
pub use geodesic::{exp_point, grassmann_exp_closed_form};
pub use point::{projector_distance, projector_residuals, GrassmannPoint, StiefelPoint};
pub use sampling::{haar_grassmann, haar_stiefel, rng_for};
pub use space::{Family, SpaceSpec};
pub use tangent::{tangent_norm, HorizontalTangent};

/// `P = ΦΦ†`.
pub fn projector(p: &StiefelPoint) -> crate::linalg::CMat {
    p.projector()
}
