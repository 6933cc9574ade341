use crate::error::{Error, Result};
use crate::linalg::{frob, frob2, identity, identity_residual, max_abs_diff, orthonormal_complement, CMat, C64};

use super::space::SpaceSpec;

/// Entrywise tolerance on `Φ†Φ = I` for frames supplied from outside.
pub const FRAME_TOL: f64 = 1e-12;
/// Tolerance on the projector identities.
pub const PROJECTOR_TOL: f64 = 1e-10;

/// An orthonormal `n × k` frame, a point of `V_{k,n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint {
    frame: CMat,
}

impl StiefelPoint {
    /// Validates `Φ†Φ = I` entrywise within [`FRAME_TOL`].
    pub fn new(frame: CMat) -> Result<Self> {
        if frame.ncols() == 0 || frame.ncols() > frame.nrows() {
            return Err(Error::InvalidSpec(format!("frame shape {}x{}", frame.nrows(), frame.ncols())));
        }
        let resid = identity_residual(&(frame.adjoint() * &frame));
        if resid > FRAME_TOL {
            return Err(Error::NotOrthonormal(resid));
        }
        Ok(Self { frame })
    }

    /// Frames produced by exact constructions (QR, unitary products) skip the
    /// entrywise check; their deviation is covered by the crate's own tests.
    pub(crate) fn from_frame_unchecked(frame: CMat) -> Self {
        Self { frame }
    }

    /// The canonical frame `[I; 0]`.
    pub fn canonical(n: usize, k: usize) -> Self {
        let mut frame = CMat::zeros(n, k);
        for i in 0..k {
            frame[(i, i)] = C64::new(1.0, 0.0);
        }
        Self { frame }
    }

    pub fn frame(&self) -> &CMat {
        &self.frame
    }

    pub fn into_frame(self) -> CMat {
        self.frame
    }

    pub fn n(&self) -> usize {
        self.frame.nrows()
    }

    pub fn k(&self) -> usize {
        self.frame.ncols()
    }

    pub fn is_canonical(&self) -> bool {
        *self == Self::canonical(self.n(), self.k())
    }

    /// Largest entrywise deviation of `Φ†Φ` from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        identity_residual(&(self.frame.adjoint() * &self.frame))
    }

    /// A unitary `Ψ̄` whose first `k` columns are this frame; the identity for
    /// the canonical frame.
    pub fn completion(&self) -> CMat {
        let n = self.n();
        if self.is_canonical() {
            return identity(n);
        }
        let comp = orthonormal_complement(&self.frame);
        let mut full = CMat::zeros(n, n);
        full.columns_mut(0, self.k()).copy_from(&self.frame);
        full.columns_mut(self.k(), n - self.k()).copy_from(&comp);
        full
    }

    /// Orthogonal projector `P = ΦΦ†` onto the column span.
    pub fn projector(&self) -> CMat {
        &self.frame * self.frame.adjoint()
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() || self.k() != other.k() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.n(), self.k()),
                actual: format!("{}x{}", other.n(), other.k()),
            });
        }
        Ok(())
    }

    pub(crate) fn check_space(&self, space: &SpaceSpec) -> Result<()> {
        if self.n() != space.n() || self.k() != space.k() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{} frame for {space}", space.n(), space.k()),
                actual: format!("{}x{}", self.n(), self.k()),
            });
        }
        Ok(())
    }
}

/// Residuals of the identities characterizing rank-`k` orthogonal projectors:
/// `‖P†−P‖`, `‖P²−P‖` (max entry), `|tr P − k|`, `|‖P − (k/n)I‖²_F − k(n−k)/n|`.
pub fn projector_residuals(p: &CMat, k: usize) -> [f64; 4] {
    let n = p.nrows();
    let herm = max_abs_diff(p, &p.adjoint());
    let idem = max_abs_diff(&(p * p), p);
    let trace = (p.trace() - C64::new(k as f64, 0.0)).norm();
    let shifted = p - identity(n) * C64::new(k as f64 / n as f64, 0.0);
    let sphere = (frob2(&shifted) - (k * (n - k)) as f64 / n as f64).abs();
    [herm, idem, trace, sphere]
}

/// A `k`-dimensional subspace, stored through an orthonormal representative.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannPoint {
    representative: StiefelPoint,
}

impl GrassmannPoint {
    /// Validates the projector identities of the representative.
    pub fn new(representative: StiefelPoint) -> Result<Self> {
        let res = projector_residuals(&representative.projector(), representative.k());
        let worst = res.iter().copied().fold(0.0, f64::max);
        if worst > PROJECTOR_TOL {
            return Err(Error::NotOrthonormal(worst));
        }
        Ok(Self { representative })
    }

    pub(crate) fn from_representative_unchecked(representative: StiefelPoint) -> Self {
        Self { representative }
    }

    pub fn representative(&self) -> &StiefelPoint {
        &self.representative
    }

    pub fn projector(&self) -> CMat {
        self.representative.projector()
    }

    pub fn n(&self) -> usize {
        self.representative.n()
    }

    pub fn k(&self) -> usize {
        self.representative.k()
    }
}

impl From<GrassmannPoint> for StiefelPoint {
    fn from(p: GrassmannPoint) -> Self {
        p.representative
    }
}

/// Distance between projectors, `‖P_Φ − P_Ψ‖_F`.
pub fn projector_distance(p: &GrassmannPoint, q: &GrassmannPoint) -> f64 {
    frob(&(p.projector() - q.projector()))
}
