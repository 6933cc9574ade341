//! Total and ball volumes, all as natural logarithms.

use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::manifold::sampling::rng_for;
use crate::manifold::space::SpaceSpec;
use crate::quadrature::{integrate, Tolerance};

/// Natural logarithm of a volume.
pub type LogVolume = f64;

/// `log |S^{m−1}| = log 2 + (m/2) log π − log Γ(m/2)`.
pub fn log_sphere_volume(m: usize) -> LogVolume {
    assert!(m >= 1, "sphere dimension must be positive");
    let h = m as f64 / 2.0;
    LN_2 + h * PI.ln() - ln_gamma(h)
}

/// `log |B^m| = log |S^{m−1}| − log m`.
pub fn log_ball_volume(m: usize) -> LogVolume {
    log_sphere_volume(m) - (m as f64).ln()
}

/// `log vol V_{k,n} = Σ_{i=n−k+1}^{n} [log 2 + i log π − log Γ(i)]`.
pub fn log_vol_stiefel(k: usize, n: usize) -> Result<LogVolume> {
    SpaceSpec::stiefel(k, n)?;
    Ok(stiefel_sum(k, n))
}

fn stiefel_sum(k: usize, n: usize) -> f64 {
    (n - k + 1..=n).map(|i| LN_2 + i as f64 * PI.ln() - ln_gamma(i as f64)).sum()
}

/// `log vol G_{k,n} = log vol V_{k,n} − log vol U(k)`.
pub fn log_vol_grassmann(k: usize, n: usize) -> Result<LogVolume> {
    SpaceSpec::grassmann(k, n)?;
    Ok(stiefel_sum(k, n) - stiefel_sum(k, k))
}

/// Total volume of the manifold described by `spec`.
pub fn log_vol(spec: SpaceSpec) -> LogVolume {
    match spec.family() {
        crate::manifold::Family::Stiefel => stiefel_sum(spec.k(), spec.n()),
        crate::manifold::Family::Grassmann => stiefel_sum(spec.k(), spec.n()) - stiefel_sum(spec.k(), spec.k()),
    }
}

/// Model space of constant curvature `κ ≥ 0` and dimension `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallModel {
    pub curvature: f64,
    pub dimension: usize,
}

impl BallModel {
    pub fn new(curvature: f64, dimension: usize) -> Result<Self> {
        if !(curvature >= 0.0 && curvature.is_finite()) || dimension == 0 {
            return Err(Error::InvalidSpec(format!("ball model kappa={curvature}, D={dimension}")));
        }
        Ok(Self { curvature, dimension })
    }

    pub fn flat(dimension: usize) -> Self {
        Self { curvature: 0.0, dimension }
    }

    /// Largest admissible radius, `π/√κ` (infinite when flat).
    pub fn max_radius(&self) -> f64 {
        if self.curvature > 0.0 {
            PI / self.curvature.sqrt()
        } else {
            f64::INFINITY
        }
    }
}

/// Relative tolerance of the radial quadrature.
pub const BALL_REL_TOL: f64 = 1e-12;

/// `log ∫₀^θ sin^p u du`, scaled so that large powers neither underflow nor
/// lose the peak.
fn log_sine_power_integral(p: usize, theta: f64) -> Result<f64> {
    if p == 0 {
        return Ok(theta.ln());
    }
    let peak = theta.min(FRAC_PI_2);
    let ln_peak = peak.sin().ln();
    let pf = p as f64;
    let mut points = vec![0.0];
    // Geometric breakpoints crowding toward the peak.
    let mut gap = peak / 2.0;
    while gap > peak * 1e-12 && points.len() < 60 {
        points.push(peak - gap);
        gap /= 2.0;
    }
    points.push(peak);
    if theta > peak {
        let mut gap = (theta - peak) / 2.0;
        let mut tail = Vec::new();
        while gap > 1e-6 && tail.len() < 30 {
            tail.push(peak + gap);
            gap /= 2.0;
        }
        tail.reverse();
        points.extend(tail);
        points.push(theta);
    }
    let tol = Tolerance::relative(BALL_REL_TOL);
    let r = integrate(|u| if u <= 0.0 { 0.0 } else { (pf * (u.sin().ln() - ln_peak)).exp() }, &points, tol)?;
    Ok(r.value.ln() + pf * ln_peak)
}

/// `log v^κ(r)`, the volume of a radius-`r` ball in the model space.
///
/// Flat: `log |B^D| + D log r`. Curved:
/// `log[(1/√κ)^D |S^{D−1}| ∫₀^{√κ r} sin^{D−1} u du]`.
pub fn ball_volume_curved(model: BallModel, r: f64) -> Result<LogVolume> {
    let d = model.dimension;
    if !(r >= 0.0) {
        return Err(Error::DomainError(format!("radius {r} must be nonnegative")));
    }
    if r > model.max_radius() {
        return Err(Error::DomainError(format!("radius {r} exceeds pi/sqrt(kappa) = {}", model.max_radius())));
    }
    if r == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if model.curvature == 0.0 {
        return Ok(log_ball_volume(d) + d as f64 * r.ln());
    }
    let sk = model.curvature.sqrt();
    let theta = (sk * r).min(PI);
    Ok(-(d as f64) * sk.ln() + log_sphere_volume(d) + log_sine_power_integral(d - 1, theta)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallMethod {
    Deterministic,
    MonteCarlo,
}

/// Result of an exact Grassmann ball computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallVolumeEstimate {
    pub log_volume: LogVolume,
    /// Relative error: quadrature estimate, or standard error over mean.
    pub rel_error: f64,
    pub method: BallMethod,
    /// Number of Monte Carlo samples, zero for quadrature.
    pub samples: u64,
    /// Significant digits the estimate supports (at most 3 for Monte Carlo).
    pub significant_digits: u32,
}

/// Monte Carlo samples drawn per seeded batch.
pub const MC_BATCH: u64 = 1 << 16;
/// Default Monte Carlo sample count.
pub const MC_DEFAULT_SAMPLES: u64 = 1_000_000;

/// `log` of the normalizing constant for the unordered cube
/// `[0, π/2]^k`: `2^k |G| Π (n−i)!/[(i−1)!]²(n−k−i)! / k!`.
fn log_grassmann_density_constant(k: usize, n: usize) -> f64 {
    let kf = k as f64;
    let mut c = kf * LN_2 + stiefel_sum(k, n) - stiefel_sum(k, k) - ln_gamma(kf + 1.0);
    for i in 1..=k {
        let i = i as f64;
        c += ln_gamma(n as f64 - i + 1.0) - 2.0 * ln_gamma(i) - ln_gamma(n as f64 - kf - i + 1.0);
    }
    c
}

/// Density over the cube, divided by `sin^{e}(θ_max)` per angle.
struct ScaledDensity {
    exponent: f64,
    ln_sin_max: f64,
}

impl ScaledDensity {
    fn eval(&self, theta: &[f64]) -> f64 {
        let mut v = 1.0;
        let mut s2 = [0.0f64; 64];
        for (i, &t) in theta.iter().enumerate() {
            let s = t.sin();
            if s <= 0.0 {
                return 0.0;
            }
            v *= (self.exponent * (s.ln() - self.ln_sin_max)).exp() * t.cos();
            s2[i] = s * s;
        }
        for j in 0..theta.len() {
            for l in j + 1..theta.len() {
                let d = s2[j] - s2[l];
                v *= d * d;
            }
        }
        v
    }
}

/// Largest Grassmann ball radius, `√k · π/2`.
pub fn grassmann_max_radius(k: usize) -> f64 {
    (k as f64).sqrt() * FRAC_PI_2
}

/// Deterministic quadrature is offered up to this `k`.
pub const DETERMINISTIC_MAX_K: usize = 3;

/// Volume of the geodesic ball of radius `r` in `G_{k,n}`.
///
/// Integrates the principal-angle density over `{θ ∈ [0, π/2]^k : ‖θ‖₂ ≤ r}`,
/// either by iterated adaptive quadrature with limits following the ball
/// boundary, or by uniform Monte Carlo over the bounding box.
pub fn exact_grassmann_ball(k: usize, n: usize, r: f64, method: BallMethod, seed: u64) -> Result<BallVolumeEstimate> {
    exact_grassmann_ball_with_samples(k, n, r, method, seed, MC_DEFAULT_SAMPLES)
}

pub fn exact_grassmann_ball_with_samples(
    k: usize,
    n: usize,
    r: f64,
    method: BallMethod,
    seed: u64,
    samples: u64,
) -> Result<BallVolumeEstimate> {
    SpaceSpec::grassmann(k, n)?;
    if k > 64 {
        return Err(Error::InvalidSpec(format!("k = {k} too large for the ball integrator")));
    }
    let rmax = grassmann_max_radius(k);
    if !(0.0..=rmax * (1.0 + 1e-12)).contains(&r) {
        return Err(Error::DomainError(format!("radius {r} outside [0, {rmax}]")));
    }
    if r == 0.0 {
        return Ok(BallVolumeEstimate {
            log_volume: f64::NEG_INFINITY,
            rel_error: 0.0,
            method,
            samples: 0,
            significant_digits: 15,
        });
    }
    let theta_max = r.min(FRAC_PI_2);
    let density = ScaledDensity { exponent: (2 * (n - 2 * k) + 1) as f64, ln_sin_max: theta_max.sin().ln() };
    let log_scale = log_grassmann_density_constant(k, n) + k as f64 * density.exponent * density.ln_sin_max;
    match method {
        BallMethod::Deterministic => {
            if k > DETERMINISTIC_MAX_K {
                return Err(Error::InvalidSpec(format!(
                    "deterministic ball volume supports k <= {DETERMINISTIC_MAX_K}"
                )));
            }
            let failure = RefCell::new(None);
            let theta = vec![0.0; k];
            let total = nested(&density, &theta, 0, r * r, theta_max, &failure)?;
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            let rel = total.error / total.value;
            Ok(BallVolumeEstimate {
                log_volume: total.value.ln() + log_scale,
                rel_error: rel,
                method,
                samples: 0,
                significant_digits: digits(rel, 15),
            })
        }
        BallMethod::MonteCarlo => {
            if samples < 2 {
                return Err(Error::InvalidSpec("Monte Carlo needs at least 2 samples".into()));
            }
            let batches = samples.div_ceil(MC_BATCH);
            let sums: Vec<(f64, f64)> = (0..batches)
                .into_par_iter()
                .map(|b| {
                    let count = MC_BATCH.min(samples - b * MC_BATCH);
                    let mut rng = rng_for(seed, b);
                    let mut t = vec![0.0; k];
                    let (mut s1, mut s2) = (0.0, 0.0);
                    for _ in 0..count {
                        let mut rho2 = 0.0;
                        for x in t.iter_mut() {
                            *x = rng.random::<f64>() * theta_max;
                            rho2 += *x * *x;
                        }
                        if rho2 <= r * r {
                            let f = density.eval(&t);
                            s1 += f;
                            s2 += f * f;
                        }
                    }
                    (s1, s2)
                })
                .collect();
            let (s1, s2) = sums.iter().fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
            let m = samples as f64;
            let mean = s1 / m;
            let var = (s2 / m - mean * mean).max(0.0) * m / (m - 1.0);
            let se = (var / m).sqrt();
            let rel = se / mean;
            Ok(BallVolumeEstimate {
                log_volume: mean.ln() + k as f64 * theta_max.ln() + log_scale,
                rel_error: rel,
                method,
                samples,
                significant_digits: digits(rel, 3),
            })
        }
    }
}

fn digits(rel: f64, cap: u32) -> u32 {
    if !(rel > 0.0) {
        return cap;
    }
    let d = (-rel.log10()).floor();
    if d < 0.0 {
        0
    } else {
        (d as u32).min(cap)
    }
}

const INNER_TOL: f64 = 1e-11;

/// Integrates over `θ_level ∈ [0, min(θ_max, √ρ²)]`, recursing inward.
fn nested(
    density: &ScaledDensity,
    theta: &[f64],
    level: usize,
    rho2: f64,
    theta_max: f64,
    failure: &RefCell<Option<Error>>,
) -> Result<crate::quadrature::Integral> {
    let k = theta.len();
    let upper = theta_max.min(rho2.max(0.0).sqrt());
    let mut points = vec![0.0];
    // Inner limits switch from θ_max to the sphere where ρ² − θ² = m θ_max².
    for m in 1..k - level {
        let s = rho2 - m as f64 * theta_max * theta_max;
        if s > 0.0 && s.sqrt() < upper {
            points.push(s.sqrt());
        }
    }
    let mut gap = upper / 2.0;
    for _ in 0..8 {
        points.push(upper - gap);
        gap /= 4.0;
    }
    points.push(upper);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let tol = Tolerance::relative(if level == 0 { 1e-10 } else { INNER_TOL }).with_abs(1e-300);
    let mut work = theta.to_vec();
    integrate(
        |t| {
            work[level] = t;
            if level + 1 == k {
                density.eval(&work)
            } else {
                match nested(density, &work, level + 1, rho2 - t * t, theta_max, failure) {
                    Ok(v) => v.value,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                }
            }
        },
        &points,
        tol,
    )
}
