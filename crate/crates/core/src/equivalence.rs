//! Equivalence of geodesic and chordal distance on `V_{k,n}`: the series
//! bound on the phase correction `κ`, its sampled counterpart, and the
//! resulting sandwich constants `β d ≤ r ≤ α d`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{expm_skew_hermitian, frob, log_unitary, CMat, C64};
use crate::manifold::distance::{chordal_grassmann, chordal_stiefel, geodesic_grassmann};
use crate::manifold::geodesic::exp_point;
use crate::manifold::point::{GrassmannPoint, StiefelPoint};
use crate::manifold::sampling::{haar_stiefel_with, rng_for};
use crate::manifold::space::{Family, SpaceSpec};
use crate::manifold::tangent::HorizontalTangent;
use crate::roots::bisect_predicate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaSeriesParams {
    /// Bound on `‖X‖_F`.
    pub delta: f64,
    pub r_max: usize,
    /// Required bound on the neglected tail.
    pub tol: f64,
}

impl KappaSeriesParams {
    pub fn new(delta: f64, r_max: usize, tol: f64) -> Result<Self> {
        if !(delta > 0.0) || r_max == 0 || !(tol > 0.0) {
            return Err(Error::InvalidSpec(format!("delta={delta}, r_max={r_max}, tol={tol}")));
        }
        Ok(Self { delta, r_max, tol })
    }
}

/// The two geometric bases `g = (e^{4δ}−1)e^{2δ}` and `f = (e^{2δ}−1)e^{4δ}`.
pub fn kappa_series_bases(delta: f64) -> (f64, f64) {
    let g = (4.0 * delta).exp_m1() * (2.0 * delta).exp();
    let f = (2.0 * delta).exp_m1() * (4.0 * delta).exp();
    (g, f)
}

/// Sum and tail bound after `terms` terms, stopping early once the partial
/// sum reaches `stop_at`.
fn partial_sum(g: f64, f: f64, params: &KappaSeriesParams, stop_at: f64) -> (f64, f64, usize) {
    let (mut gp, mut fp) = (1.0, 1.0);
    let mut sum = 0.0;
    for r in 1..=params.r_max {
        gp *= g;
        fp *= f;
        sum += (gp + fp) / (r as f64 + 1.0);
        let tail = (gp * g / (1.0 - g) + fp * f / (1.0 - f)) / (r as f64 + 2.0);
        if tail <= params.tol || sum >= stop_at {
            return (sum, tail, r);
        }
    }
    (sum, f64::INFINITY, params.r_max)
}

/// Upper bound on the phase-correction ratio `κ` for `‖X‖_F ≤ δ`:
/// `Σ_{r≥1} (g^r + f^r)/(r+1)`.
pub fn kappa_series(params: &KappaSeriesParams) -> Result<f64> {
    let (g, f) = kappa_series_bases(params.delta);
    if g >= 1.0 || f >= 1.0 {
        return Err(Error::Divergent(format!("series bases g={g:.6}, f={f:.6} at delta={}", params.delta)));
    }
    let (sum, tail, _) = partial_sum(g, f, params, f64::INFINITY);
    if tail > params.tol {
        return Err(Error::NotConverged(format!("tail {tail:e} after {} terms", params.r_max)));
    }
    Ok(sum)
}

/// Width of the final bracket in [`delta_threshold`].
pub const DELTA_BRACKET: f64 = 1e-10;
const THRESHOLD_R_MAX: usize = 1_000_000;

/// Largest `δ` for which the series converges with `κ < 1`, to within
/// [`DELTA_BRACKET`] (the returned value is the feasible end of the bracket).
pub fn delta_threshold(tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidSpec(format!("tol={tol}")));
    }
    let holds = |delta: f64| {
        if delta == 0.0 {
            return true;
        }
        let (g, f) = kappa_series_bases(delta);
        if g >= 1.0 || f >= 1.0 {
            return false;
        }
        let params = KappaSeriesParams { delta, r_max: THRESHOLD_R_MAX, tol };
        let (sum, _, _) = partial_sum(g, f, &params, 1.0);
        sum < 1.0
    };
    let (lo, _) = bisect_predicate(holds, 0.0, 0.25, DELTA_BRACKET)?;
    Ok(lo)
}

/// Which expression turns `κ` into `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaConvention {
    /// `π / (2(1−κ))`.
    #[default]
    Half,
    /// `π / (√2(1−κ))`.
    RootTwo,
}

pub fn alpha_from_kappa(kappa: f64) -> Result<f64> {
    alpha_from_kappa_with(kappa, AlphaConvention::Half)
}

pub fn alpha_from_kappa_with(kappa: f64, convention: AlphaConvention) -> Result<f64> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::DomainError(format!("kappa must lie in [0, 1), got {kappa}")));
    }
    Ok(match convention {
        AlphaConvention::Half => PI / (2.0 * (1.0 - kappa)),
        AlphaConvention::RootTwo => PI / (SQRT_2 * (1.0 - kappa)),
    })
}

/// Factorization `exp X [I; 0] = exp Z [v; 0]` with `Z` horizontal, `A = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDecomposition {
    pub z_part: HorizontalTangent,
    pub v: CMat,
    pub a_tilde: CMat,
    pub correction: CMat,
    pub kappa_emp: f64,
    /// `‖exp(−Z)exp(X) − diag(v, w)‖_F`, where `w` is its lower-right block.
    pub residual: f64,
}

/// Residual above which a decomposition is rejected.
pub const DECOMPOSITION_TOL: f64 = 1e-6;
const ZERO_A: f64 = 1e-14;

/// Splits the geodesic `exp X` into a Grassmann part and a phase.
///
/// `Z` is the Grassmann geodesic from `[I; 0]` to the span of
/// `Φ = exp X [I; 0]`, so `exp(−Z)exp(X)` is block diagonal with upper block
/// `v`; the lower block lies in the isotropy group and is not the identity in
/// general. `κ_emp = ‖log v − A‖_F / ‖A‖_F`.
pub fn phase_decompose(x: &HorizontalTangent) -> Result<PhaseDecomposition> {
    let space = x.space();
    if space.family() != Family::Stiefel {
        return Err(Error::InvalidSpec("phase decomposition needs a Stiefel tangent".into()));
    }
    let k = space.k();
    let e = expm_skew_hermitian(&x.embed());
    let phi = e.columns(0, k).into_owned();
    let d = decompose_frame(space, &phi, x.a_block())?;
    let m = expm_skew_hermitian(&(-d.z_part.embed())) * &e;
    let mut block = CMat::zeros(space.n(), space.n());
    block.view_mut((0, 0), (k, k)).copy_from(&d.v);
    let w = space.n() - k;
    block.view_mut((k, k), (w, w)).copy_from(&m.view((k, k), (w, w)));
    let residual = frob(&(m - block));
    if residual > DECOMPOSITION_TOL {
        return Err(Error::DecompositionResidual(residual));
    }
    Ok(PhaseDecomposition { residual, ..d })
}

/// The same decomposition for a generated pair `(base, point)`, with `point`
/// reached from `base` along a tangent whose upper block is `a`. Only the
/// first `k` columns enter, so the residual is `‖exp(−Z)[Φ'] − [v; 0]‖_F`
/// for `Φ'` the point in the frame of `base`.
pub fn phase_decompose_pair(base: &StiefelPoint, point: &StiefelPoint, a: &CMat) -> Result<PhaseDecomposition> {
    base.check_compatible(point)?;
    let space = SpaceSpec::stiefel(base.k(), base.n())?;
    let local = base.completion().adjoint() * point.frame();
    decompose_frame(space, &local, a)
}

fn decompose_frame(space: SpaceSpec, phi: &CMat, a: &CMat) -> Result<PhaseDecomposition> {
    let (k, n) = (space.k(), space.n());
    let phi1 = phi.rows(0, k).into_owned();
    let phi2 = phi.rows(k, n - k).into_owned();
    let svd = phi1.svd(true, true);
    let p = svd.u.expect("requested");
    let q = svd.v_t.expect("requested").adjoint();
    let cos = &svd.singular_values;
    let phi2q = &phi2 * &q;
    let scale: Vec<f64> = (0..k)
        .map(|i| {
            let s = if n > k { phi2q.column(i).norm() } else { 0.0 };
            let theta = s.atan2(cos[i]);
            if s > 0.0 {
                theta / s
            } else {
                1.0
            }
        })
        .collect();
    let diag = CMat::from_fn(k, k, |i, j| if i == j { C64::new(scale[i], 0.0) } else { C64::new(0.0, 0.0) });
    let b_z = phi2q * diag * p.adjoint();
    let z_part = HorizontalTangent::from_b(space, b_z)?;
    let v = &p * q.adjoint();
    let a_tilde = log_unitary(&v)?;
    let correction = &a_tilde - a;
    let a_norm = frob(a);
    let kappa_emp = if a_norm < ZERO_A { 0.0 } else { frob(&correction) / a_norm };
    let head = expm_skew_hermitian(&(-z_part.embed())) * phi;
    let mut target = CMat::zeros(n, k);
    target.rows_mut(0, k).copy_from(&v);
    let residual = frob(&(head - target));
    if residual > DECOMPOSITION_TOL {
        return Err(Error::DecompositionResidual(residual));
    }
    Ok(PhaseDecomposition { z_part, v, a_tilde, correction, kappa_emp, residual })
}

/// Number of bins and the range of the `1 − κ` histogram.
pub const HIST_BINS: usize = 20;
pub const HIST_RANGE: (f64, f64) = (0.0, 1.2);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaHistogram {
    pub space: SpaceSpec,
    pub delta: f64,
    pub samples: usize,
    pub seed: u64,
    pub mean_one_minus_kappa: f64,
    pub min: f64,
    pub max: f64,
    /// Bin edges, `HIST_BINS + 1` values.
    pub bin_edges: Vec<f64>,
    /// Counts of `1 − κ_emp`; values outside the range go to the edge bins.
    pub bin_counts: Vec<u64>,
    /// Samples with `κ_emp < 1`.
    pub kappa_below_one: usize,
}

/// Samples `1 − κ_emp` over tangents with `‖X‖_F = delta` and isotropic
/// direction. Sample `i` uses stream `i` under `seed`.
pub fn kappa_histogram(space: SpaceSpec, delta: f64, samples: usize, seed: u64) -> Result<KappaHistogram> {
    if space.family() != Family::Stiefel {
        return Err(Error::InvalidSpec("kappa histogram needs a Stiefel space".into()));
    }
    if samples == 0 || !(delta > 0.0) {
        return Err(Error::InvalidSpec(format!("samples={samples}, delta={delta}")));
    }
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let x = HorizontalTangent::random_with_frobenius(space, delta, &mut rng);
            phase_decompose(&x).map(|d| 1.0 - d.kappa_emp)
        })
        .collect::<Result<_>>()?;
    let (lo, hi) = HIST_RANGE;
    let width = (hi - lo) / HIST_BINS as f64;
    let mut bin_counts = vec![0u64; HIST_BINS];
    for &v in &values {
        let idx = ((v - lo) / width).floor();
        let idx = if idx < 0.0 { 0 } else { (idx as usize).min(HIST_BINS - 1) };
        bin_counts[idx] += 1;
    }
    Ok(KappaHistogram {
        space,
        delta,
        samples,
        seed,
        mean_one_minus_kappa: values.iter().sum::<f64>() / samples as f64,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        bin_edges: (0..=HIST_BINS).map(|i| lo + i as f64 * width).collect(),
        bin_counts,
        kappa_below_one: values.iter().filter(|&&v| v > 0.0).count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub samples: usize,
    pub beta: f64,
    /// `None` where no proven upper constant applies (Stiefel with `k < n`).
    pub alpha: Option<f64>,
    pub violations_lower: usize,
    pub violations_upper: usize,
    /// Smallest `r / (β d)` seen; at least 1 when the lower side holds.
    pub worst_lower_ratio: f64,
    /// Largest `r / (α d)` seen; at most 1 when the upper side holds.
    pub worst_upper_ratio: f64,
}

/// Slack allowed before a sandwich inequality counts as violated.
pub const SANDWICH_TOL: f64 = 1e-10;

/// Samples pairs `(Ψ, exp_Ψ X)` with `‖X‖ ≤ max_norm` and checks
/// `β d ≤ r ≤ α d` with the proven constants of the space.
pub fn verify_sandwich(space: SpaceSpec, samples: usize, seed: u64, max_norm: f64) -> Result<SandwichReport> {
    if samples == 0 || !(max_norm > 0.0) {
        return Err(Error::InvalidSpec(format!("samples={samples}, max_norm={max_norm}")));
    }
    let (beta, alpha) = match space.family() {
        Family::Grassmann => (1.0, Some(FRAC_PI_2)),
        Family::Stiefel if space.is_unitary() => (1.0 / SQRT_2, Some(PI / (2.0 * SQRT_2))),
        Family::Stiefel => (1.0 / SQRT_2, None),
    };
    let pairs: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let mut rng = rng_for(seed, i as u64);
            let base = haar_stiefel_with(space, &mut rng)?;
            let norm = max_norm * rand::Rng::random::<f64>(&mut rng);
            let x = HorizontalTangent::random_with_norm(space, norm, &mut rng);
            let point = exp_point(&base, &x)?;
            match space.family() {
                Family::Grassmann => {
                    let p = GrassmannPoint::from_representative_unchecked(base);
                    let q = GrassmannPoint::from_representative_unchecked(point);
                    Ok((chordal_grassmann(&p, &q)?, geodesic_grassmann(&p, &q)?))
                }
                Family::Stiefel => Ok((chordal_stiefel(&base, &point)?, x.norm())),
            }
        })
        .collect::<Result<_>>()?;
    let mut report = SandwichReport {
        samples,
        beta,
        alpha,
        violations_lower: 0,
        violations_upper: 0,
        worst_lower_ratio: f64::INFINITY,
        worst_upper_ratio: 0.0,
    };
    for &(d, r) in &pairs {
        if beta * d > r + SANDWICH_TOL {
            report.violations_lower += 1;
        }
        if let Some(a) = alpha {
            if r > a * d + SANDWICH_TOL {
                report.violations_upper += 1;
            }
        }
        if d > 0.0 {
            report.worst_lower_ratio = report.worst_lower_ratio.min(r / (beta * d));
            if let Some(a) = alpha {
                report.worst_upper_ratio = report.worst_upper_ratio.max(r / (a * d));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff};

    #[test]
    fn series_examples() {
        let small = kappa_series(&KappaSeriesParams::new(1e-6, 100, 1e-15).unwrap()).unwrap();
        assert!(small > 0.0 && small < 1e-4);
        assert!(matches!(kappa_series(&KappaSeriesParams::new(0.2, 100, 1e-12).unwrap()), Err(Error::Divergent(_))));

        let delta = 0.05;
        let value = kappa_series(&KappaSeriesParams::new(delta, 10_000, 1e-15).unwrap()).unwrap();
        let (g, f) = kappa_series_bases(delta);
        let brute: f64 = (1..=1000).map(|r| (g.powi(r) + f.powi(r)) / (r as f64 + 1.0)).sum();
        assert!((value - brute).abs() < 1e-12);
    }

    #[test]
    fn series_budget_reported() {
        let p = KappaSeriesParams::new(0.1, 2, 1e-15).unwrap();
        assert!(matches!(kappa_series(&p), Err(Error::NotConverged(_))));
    }

    #[test]
    fn threshold_is_bracketed() {
        let d = delta_threshold(1e-12).unwrap();
        assert!(d > 0.0 && d < 0.2);
        let p = KappaSeriesParams::new(d, 1_000_000, 1e-12).unwrap();
        assert!(kappa_series(&p).unwrap() < 1.0);
        let above = KappaSeriesParams::new(d + 1e-6, 1_000_000, 1e-12).unwrap();
        assert!(kappa_series(&above).map_or(true, |k| k >= 1.0));
    }

    #[test]
    fn alpha_examples() {
        assert!((alpha_from_kappa(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((alpha_from_kappa(0.1).unwrap() - PI / 1.8).abs() < 1e-15);
        let k = 1.0 - 1.0 / SQRT_2;
        assert!((alpha_from_kappa(k).unwrap() - PI / SQRT_2).abs() < 1e-14);
        assert!(alpha_from_kappa(1.0).is_err());
        assert!((alpha_from_kappa_with(0.0, AlphaConvention::RootTwo).unwrap() - PI / SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn pure_grassmann_tangent_has_trivial_phase() {
        let space = SpaceSpec::stiefel(2, 4).unwrap();
        let x = HorizontalTangent::random_with_frobenius(space, 1.0, &mut rng_for(3, 0)).b_part();
        let d = phase_decompose(&x).unwrap();
        assert!(max_abs_diff(&d.v, &identity(2)) < 1e-12);
        assert!(frob(&d.a_tilde) < 1e-12);
        assert_eq!(d.kappa_emp, 0.0);
        assert!(max_abs_diff(&d.z_part.embed(), &x.embed()) < 1e-12);
    }

    #[test]
    fn pure_phase_tangent_is_its_own_log() {
        let space = SpaceSpec::stiefel(2, 5).unwrap();
        let x = HorizontalTangent::random_with_frobenius(space, 1.0, &mut rng_for(4, 0)).a_part();
        let d = phase_decompose(&x).unwrap();
        assert!(d.z_part.norm() < 1e-12);
        assert!(max_abs_diff(&d.a_tilde, x.a_block()) < 1e-12);
        assert!(d.kappa_emp < 1e-12);
    }

    #[test]
    fn unitary_case_has_no_grassmann_part() {
        let space = SpaceSpec::unitary(3).unwrap();
        let x = HorizontalTangent::random_with_frobenius(space, 1.0, &mut rng_for(5, 0));
        let d = phase_decompose(&x).unwrap();
        assert!(d.kappa_emp < 1e-12);
    }

    #[test]
    fn histogram_is_deterministic_and_complete() {
        let space = SpaceSpec::stiefel(2, 4).unwrap();
        let a = kappa_histogram(space, 1.25, 64, 7).unwrap();
        let b = kappa_histogram(space, 1.25, 64, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.bin_counts.iter().sum::<u64>(), 64);
        assert!(kappa_histogram(SpaceSpec::grassmann(1, 2).unwrap(), 1.0, 4, 0).is_err());
    }

    #[test]
    fn sandwich_on_small_spaces() {
        let g = verify_sandwich(SpaceSpec::grassmann(1, 2).unwrap(), 500, 1, 1.0).unwrap();
        assert_eq!((g.violations_lower, g.violations_upper), (0, 0));
        let u = verify_sandwich(SpaceSpec::unitary(2).unwrap(), 500, 1, 1.0).unwrap();
        assert_eq!((u.violations_lower, u.violations_upper), (0, 0));
    }
}
