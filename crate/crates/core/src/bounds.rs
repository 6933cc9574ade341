//! Gilbert–Varshamov and Hamming bounds on the minimal geodesic distance of
//! codes in `V_{k,n}` and `G_{k,n}`, together with their translations to
//! coding-space chordal distances.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, LN_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::space::{Family, SpaceSpec};
use crate::roots::bisect_increasing;
use crate::volumes::{ball_volume_curved, log_ball_volume, log_sphere_volume, log_vol, BallModel, LogVolume};

/// Relative tolerance of every radius inversion.
pub const RADIUS_REL_TOL: f64 = 1e-10;

/// A space together with a rate `R = log₂|C| / n` in bits per time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub space: SpaceSpec,
    pub rate: f64,
}

impl BoundQuery {
    pub fn new(space: SpaceSpec, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidSpec(format!("rate must be positive, got {rate}")));
        }
        Ok(Self { space, rate })
    }

    /// `log(vol M / 2^{nR})`, the volume one codeword may claim.
    pub fn log_target(&self) -> LogVolume {
        log_vol(self.space) - self.space.n() as f64 * self.rate * LN_2
    }
}

/// Real dimension `D`: `k(2n−k)` for Stiefel, `2k(n−k)` for Grassmann.
pub fn dimension(space: SpaceSpec) -> usize {
    space.real_dimension()
}

/// Default curvature cap: 2 on `U(k)`, 5/2 on `V_{k,n}` with `k < n`, 4 on
/// `G_{k,n}`.
pub fn default_kappa_bar(space: SpaceSpec) -> f64 {
    match space.family() {
        Family::Grassmann => 4.0,
        Family::Stiefel if space.is_unitary() => 2.0,
        Family::Stiefel => 2.5,
    }
}

/// Gilbert–Varshamov radius `r̲₀ = (vol M / (2^{nR} |B^D|))^{1/D}`.
pub fn gv_lower(query: &BoundQuery) -> f64 {
    let d = dimension(query.space) as f64;
    ((query.log_target() - log_ball_volume(dimension(query.space))) / d).exp()
}

/// Hamming radius `r̄₀ = 2 (v^{κ̄})^{-1}(vol M / 2^{nR})`, or `None` when the
/// target exceeds the volume of the whole model sphere.
pub fn hamming_upper(query: &BoundQuery, kappa_bar: f64) -> Result<Option<f64>> {
    let model = BallModel::new(kappa_bar, dimension(query.space))?;
    if kappa_bar == 0.0 {
        return Err(Error::InvalidSpec("the Hamming bound needs a positive curvature cap".into()));
    }
    let rmax = model.max_radius();
    let target = query.log_target();
    let full = log_full_sphere(model);
    if target > full {
        return Ok(None);
    }
    let mut failure = None;
    let r = bisect_increasing(
        |r| match ball_volume_curved(model, r) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        target,
        0.0,
        rmax,
        RADIUS_REL_TOL,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Some(2.0 * r))
}

/// `log v^κ(π/√κ) = log |S^D| − D log √κ`, the whole model sphere.
fn log_full_sphere(model: BallModel) -> f64 {
    log_sphere_volume(model.dimension + 1) - model.dimension as f64 * model.curvature.sqrt().ln()
}

/// `2^{−nR/D}`.
pub fn theorem_floor(query: &BoundQuery) -> f64 {
    let d = dimension(query.space) as f64;
    (-(query.space.n() as f64) * query.rate * LN_2 / d).exp()
}

/// Large-`n` limit of the GV radius, `√(k · 2^{−R/k})`.
pub fn asymptotic_limit(k: usize, rate: f64) -> f64 {
    let k = k as f64;
    (k * (-rate / k * LN_2).exp()).sqrt()
}

/// Asymptotic comparison bounds for Grassmann codes, geodesic and chordal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BargNogin {
    pub geodesic_lo: f64,
    pub geodesic_hi: f64,
    pub chordal_lo: f64,
    pub chordal_hi: f64,
}

pub fn barg_nogin(k: usize, rate: f64) -> Result<BargNogin> {
    if k == 0 || !(rate > 0.0) {
        return Err(Error::InvalidSpec(format!("k={k}, R={rate}")));
    }
    let kf = k as f64;
    let arg = (-rate / (2.0 * kf) * LN_2).exp();
    if arg > 1.0 {
        return Err(Error::DomainError(format!("arcsin argument {arg} exceeds 1")));
    }
    let geodesic_lo = kf.sqrt() * arg.asin();
    let x = (-rate / kf * LN_2).exp();
    Ok(BargNogin {
        geodesic_lo,
        geodesic_hi: 2.0 * geodesic_lo,
        chordal_lo: (kf * x).sqrt(),
        chordal_hi: (2.0 * kf * (1.0 - (1.0 - x).powi(2))).sqrt(),
    })
}

/// `log B_{k,n} = log vol M − log |B^D|` and `b = B^{1/D}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BFactor {
    pub log_b: f64,
    pub b: f64,
}

pub fn b_factor(space: SpaceSpec) -> BFactor {
    let d = dimension(space);
    let log_b = log_vol(space) - log_ball_volume(d);
    BFactor { log_b, b: (log_b / d as f64).exp() }
}

/// [`b_factor`] on raw dimensions. Grassmann admits every `1 ≤ k < n` here,
/// using the isometry `G_{k,n} ≅ G_{n−k,n}`.
pub fn b_factor_dims(family: Family, k: usize, n: usize) -> Result<BFactor> {
    let space = match family {
        Family::Stiefel => SpaceSpec::stiefel(k, n)?,
        Family::Grassmann if k >= 1 && k < n => SpaceSpec::grassmann(k.min(n - k), n)?,
        Family::Grassmann => return Err(Error::InvalidSpec(format!("Grassmann needs 1 <= k < n, got k={k}, n={n}"))),
    };
    Ok(b_factor(space))
}

/// Constants of the metric sandwich `β d ≤ r ≤ α d` and the power factor `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivConstants {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    /// False when `alpha` is an empirical estimate rather than proven.
    pub rigorous: bool,
}

/// Empirical `1 − κ` used for the default Stiefel `α` when `k < n`.
pub const DEFAULT_ONE_MINUS_KAPPA: f64 = 0.9;

impl EquivConstants {
    pub fn new(alpha: f64, beta: f64, mu: f64, rigorous: bool) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && mu > 0.0) || beta > alpha {
            return Err(Error::InvalidSpec(format!(
                "need 0 < beta <= alpha and mu > 0, got alpha={alpha}, beta={beta}, mu={mu}"
            )));
        }
        Ok(Self { alpha, beta, mu, rigorous })
    }

    /// Defaults per space: Grassmann `β = 1, α = π/2, μ = ½`; unitary
    /// `β = 1/√2, α = π/(2√2)`; Stiefel `β = 1/√2, α = π/(2·0.9)` (not proven).
    pub fn defaults(space: SpaceSpec) -> Self {
        match space.family() {
            Family::Grassmann => Self { alpha: FRAC_PI_2, beta: 1.0, mu: 0.5, rigorous: true },
            Family::Stiefel if space.is_unitary() => {
                Self { alpha: PI / (2.0 * SQRT_2), beta: FRAC_1_SQRT_2, mu: 1.0, rigorous: true }
            }
            Family::Stiefel => {
                Self { alpha: PI / (2.0 * DEFAULT_ONE_MINUS_KAPPA), beta: FRAC_1_SQRT_2, mu: 1.0, rigorous: false }
            }
        }
    }

    /// `μ = 1` for Stiefel, `½` for Grassmann.
    pub fn mu_for(family: Family) -> f64 {
        match family {
            Family::Stiefel => 1.0,
            Family::Grassmann => 0.5,
        }
    }
}

/// Coding-space distance bounds `(d̲̃₀, d̄̃₀)`:
/// `d̲̃₀ = √(μn/k) r̲₀ / α`, `d̄̃₀ = √(μn/k) r̄₀ / β`.
pub fn coding_bounds(query: &BoundQuery, constants: &EquivConstants, kappa_bar: f64) -> Result<(f64, Option<f64>)> {
    let scale = (constants.mu * query.space.n() as f64 / query.space.k() as f64).sqrt();
    let lower = scale * gv_lower(query) / constants.alpha;
    let upper = hamming_upper(query, kappa_bar)?.map(|r| scale * r / constants.beta);
    Ok((lower, upper))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub space: SpaceSpec,
    pub rate: f64,
    pub dimension: usize,
    pub log_vol: LogVolume,
    pub kappa_bar: f64,
    pub gv_lower: f64,
    /// `None` when infeasible.
    pub hamming_upper: Option<f64>,
    pub theorem_floor: f64,
    pub coding_lower: f64,
    pub coding_upper: Option<f64>,
    pub constants: EquivConstants,
}

/// All bounds for one query. `kappa_bar` and `constants` fall back to the
/// space defaults.
pub fn bound_report(
    query: &BoundQuery,
    kappa_bar: Option<f64>,
    constants: Option<EquivConstants>,
) -> Result<BoundReport> {
    let kappa_bar = kappa_bar.unwrap_or_else(|| default_kappa_bar(query.space));
    let constants = constants.unwrap_or_else(|| EquivConstants::defaults(query.space));
    let scale = (constants.mu * query.space.n() as f64 / query.space.k() as f64).sqrt();
    let gv = gv_lower(query);
    let hamming = hamming_upper(query, kappa_bar)?;
    Ok(BoundReport {
        space: query.space,
        rate: query.rate,
        dimension: dimension(query.space),
        log_vol: log_vol(query.space),
        kappa_bar,
        gv_lower: gv,
        hamming_upper: hamming,
        theorem_floor: theorem_floor(query),
        coding_lower: scale * gv / constants.alpha,
        coding_upper: hamming.map(|r| scale * r / constants.beta),
        constants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(space: SpaceSpec, rate: f64) -> BoundQuery {
        BoundQuery::new(space, rate).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(dimension(SpaceSpec::stiefel(2, 4).unwrap()), 12);
        assert_eq!(dimension(SpaceSpec::grassmann(2, 4).unwrap()), 8);
        assert_eq!(dimension(SpaceSpec::unitary(2).unwrap()), 4);
    }

    #[test]
    fn projective_line_rate_one() {
        let g12 = q(SpaceSpec::grassmann(1, 2).unwrap(), 1.0);
        assert!((gv_lower(&g12) - 0.5).abs() < 1e-15);
        let h = hamming_upper(&g12, 4.0).unwrap().unwrap();
        assert!((h - PI / 3.0).abs() < 1e-9);
        let (lo, _) = coding_bounds(&g12, &EquivConstants::defaults(g12.space), 4.0).unwrap();
        assert!((lo - 1.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn unitary_low_rate_is_infeasible() {
        let u2 = SpaceSpec::unitary(2).unwrap();
        assert_eq!(hamming_upper(&q(u2, 1.0), 2.0).unwrap(), None);
        let r10 = hamming_upper(&q(u2, 10.0), 2.0).unwrap().unwrap();
        assert!(r10 >= gv_lower(&q(u2, 10.0)));
    }

    #[test]
    fn floor_examples() {
        assert!((theorem_floor(&q(SpaceSpec::unitary(1).unwrap(), 1.0)) - 0.5).abs() < 1e-15);
        assert!((theorem_floor(&q(SpaceSpec::stiefel(2, 4).unwrap(), 1.0)) - 2f64.powf(-1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_examples() {
        assert!((asymptotic_limit(1, 1.0) - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((asymptotic_limit(2, 2.0) - 1.0).abs() < 1e-15);
        let bn = barg_nogin(1, 1.0).unwrap();
        assert!((bn.chordal_lo - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((bn.geodesic_lo - PI / 4.0).abs() < 1e-15);
        assert!((bn.chordal_hi - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn b_factor_examples() {
        assert!(b_factor(SpaceSpec::grassmann(1, 2).unwrap()).log_b.abs() < 1e-14);
        assert!((b_factor(SpaceSpec::unitary(1).unwrap()).log_b - PI.ln()).abs() < 1e-14);
        let b = b_factor(SpaceSpec::stiefel(2, 2000).unwrap()).b;
        assert!((b - SQRT_2).abs() / SQRT_2 < 0.02);
    }

    #[test]
    fn raw_constants_recover_packing_bounds() {
        let query = q(SpaceSpec::stiefel(2, 5).unwrap(), 10.0);
        let ones = EquivConstants::new(1.0, 1.0, 1.0, true).unwrap();
        let (lo, hi) = coding_bounds(&query, &ones, 2.5).unwrap();
        let s = (5.0f64 / 2.0).sqrt();
        assert!((lo - s * gv_lower(&query)).abs() < 1e-14);
        assert!((hi.unwrap() - s * hamming_upper(&query, 2.5).unwrap().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn report_is_consistent() {
        let query = q(SpaceSpec::grassmann(2, 6).unwrap(), 10.0);
        let rep = bound_report(&query, None, None).unwrap();
        assert_eq!(rep.kappa_bar, 4.0);
        assert!(rep.theorem_floor <= rep.gv_lower + 1e-12);
        let h = rep.hamming_upper.unwrap();
        assert!((h - hamming_upper(&query, 4.0).unwrap().unwrap()).abs() < 1e-12);
        assert!(rep.gv_lower <= h);
    }

    #[test]
    fn bad_constants_rejected() {
        assert!(EquivConstants::new(1.0, 2.0, 1.0, true).is_err());
        assert!(BoundQuery::new(SpaceSpec::unitary(1).unwrap(), 0.0).is_err());
    }
}
