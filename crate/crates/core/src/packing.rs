//! Greedy packings and empirical checks of the GV and Hamming inequalities.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{default_kappa_bar, EquivConstants};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::manifold::distance::principal_angles;
use crate::manifold::point::StiefelPoint;
use crate::manifold::sampling::{haar_stiefel_with, rng_for};
use crate::manifold::space::{Family, SpaceSpec};
use crate::volumes::{ball_volume_curved, log_vol, BallModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    GeodesicGrassmann,
    ChordalStiefel,
    ChordalGrassmann,
}

impl Metric {
    /// The coding metric of a family: chordal on Stiefel, geodesic on Grassmann.
    pub fn default_for(family: Family) -> Self {
        match family {
            Family::Stiefel => Metric::ChordalStiefel,
            Family::Grassmann => Metric::GeodesicGrassmann,
        }
    }

    fn family(self) -> Family {
        match self {
            Metric::ChordalStiefel => Family::Stiefel,
            Metric::GeodesicGrassmann | Metric::ChordalGrassmann => Family::Grassmann,
        }
    }

    fn check(self, space: SpaceSpec) -> Result<()> {
        if self.family() != space.family() {
            return Err(Error::InvalidSpec(format!("metric {self} does not apply to {space}")));
        }
        Ok(())
    }

    /// Distance between two frames.
    pub fn distance(self, p: &StiefelPoint, q: &StiefelPoint) -> Result<f64> {
        Ok(match self {
            Metric::ChordalStiefel => diff_norm2(p.frame(), q.frame()).sqrt(),
            Metric::ChordalGrassmann => principal_angles(p, q)?.sin_norm(),
            Metric::GeodesicGrassmann => principal_angles(p, q)?.norm(),
        })
    }

    /// Whether `distance(p, q) >= d0`, skipping the SVD when the chordal
    /// Grassmann value `√(k − ‖Φ†Ψ‖²_F)` already decides it.
    fn at_least(self, p: &StiefelPoint, q: &StiefelPoint, d0: f64) -> Result<bool> {
        if self == Metric::GeodesicGrassmann {
            let chord = (p.k() as f64 - overlap_norm2(p.frame(), q.frame())).max(0.0).sqrt();
            if chord >= d0 * (1.0 + 1e-12) {
                return Ok(true);
            }
            if FRAC_PI_2 * chord < d0 * (1.0 - 1e-12) {
                return Ok(false);
            }
            // Cosines alone are accurate away from the threshold.
            let overlap = p.frame().adjoint() * q.frame();
            let rough = overlap.singular_values().iter().map(|c| c.clamp(0.0, 1.0).acos().powi(2)).sum::<f64>().sqrt();
            if (rough - d0).abs() > 1e-6 {
                return Ok(rough > d0);
            }
        }
        Ok(self.distance(p, q)? >= d0)
    }
}

/// `‖A − B‖²_F` without allocating.
fn diff_norm2(a: &CMat, b: &CMat) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm_sqr()).sum()
}

/// `‖A†B‖²_F` without allocating.
fn overlap_norm2(a: &CMat, b: &CMat) -> f64 {
    let mut total = 0.0;
    for ca in a.column_iter() {
        for cb in b.column_iter() {
            let dot: C64 = ca.iter().zip(cb.iter()).map(|(x, y)| x.conj() * y).sum();
            total += dot.norm_sqr();
        }
    }
    total
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::GeodesicGrassmann => "geodesic-grassmann",
            Metric::ChordalStiefel => "chordal-stiefel",
            Metric::ChordalGrassmann => "chordal-grassmann",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geodesic-grassmann" | "geodesic" => Ok(Metric::GeodesicGrassmann),
            "chordal-stiefel" => Ok(Metric::ChordalStiefel),
            "chordal-grassmann" => Ok(Metric::ChordalGrassmann),
            other => Err(Error::InvalidSpec(format!("unknown metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    space: SpaceSpec,
    metric: Metric,
    points: Vec<StiefelPoint>,
}

impl Codebook {
    pub fn new(space: SpaceSpec, metric: Metric, points: Vec<StiefelPoint>) -> Result<Self> {
        metric.check(space)?;
        if points.is_empty() {
            return Err(Error::TooFewPoints(0));
        }
        for p in &points {
            p.check_space(&space)?;
        }
        Ok(Self { space, metric, points })
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn points(&self) -> &[StiefelPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CodebookFile::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodebookFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("codebook JSON: {e}")))?;
        file.try_into()
    }
}

/// On-disk form: each point is its frame in row-major order as `[re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodebookFile {
    pub family: Family,
    pub k: usize,
    pub n: usize,
    pub metric: Metric,
    pub points: Vec<Vec<[f64; 2]>>,
}

impl From<&Codebook> for CodebookFile {
    fn from(cb: &Codebook) -> Self {
        let points = cb
            .points
            .iter()
            .map(|p| {
                let f = p.frame();
                (0..f.nrows()).flat_map(|i| (0..f.ncols()).map(move |j| [f[(i, j)].re, f[(i, j)].im])).collect()
            })
            .collect();
        Self { family: cb.space.family(), k: cb.space.k(), n: cb.space.n(), metric: cb.metric, points }
    }
}

impl TryFrom<CodebookFile> for Codebook {
    type Error = Error;

    fn try_from(file: CodebookFile) -> Result<Self> {
        let space = SpaceSpec::new(file.family, file.k, file.n)?;
        let points = file
            .points
            .iter()
            .map(|flat| {
                if flat.len() != file.n * file.k {
                    return Err(Error::DimensionMismatch {
                        expected: format!("{} entries", file.n * file.k),
                        actual: flat.len().to_string(),
                    });
                }
                let frame = CMat::from_fn(file.n, file.k, |i, j| {
                    let [re, im] = flat[i * file.k + j];
                    C64::new(re, im)
                });
                StiefelPoint::new(frame)
            })
            .collect::<Result<Vec<_>>>()?;
        Codebook::new(space, file.metric, points)
    }
}

/// Minimum pairwise distance in the codebook's metric.
pub fn min_distance(cb: &Codebook) -> Result<f64> {
    if cb.len() < 2 {
        return Err(Error::TooFewPoints(cb.len()));
    }
    let mut best = f64::INFINITY;
    for (i, p) in cb.points.iter().enumerate() {
        for q in &cb.points[i + 1..] {
            // On Grassmann both metrics are at least the cheap chord.
            if cb.metric != Metric::ChordalStiefel {
                let chord = (p.k() as f64 - overlap_norm2(p.frame(), q.frame())).max(0.0).sqrt();
                if chord > best * (1.0 + 1e-9) + 1e-12 {
                    continue;
                }
            }
            best = best.min(cb.metric.distance(p, q)?);
        }
    }
    Ok(best)
}

/// Default number of consecutive rejections that ends a greedy run.
pub const DEFAULT_REJECTION_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreedyConfig {
    pub seed: u64,
    pub rejection_cap: usize,
    pub target_distance: f64,
}

impl GreedyConfig {
    pub fn new(seed: u64, rejection_cap: usize, target_distance: f64) -> Result<Self> {
        if rejection_cap == 0 || !(target_distance > 0.0) {
            return Err(Error::InvalidSpec(format!("T={rejection_cap}, d0={target_distance}")));
        }
        Ok(Self { seed, rejection_cap, target_distance })
    }
}

/// Greedy rejection packing: draw Haar points from one seeded stream, keep a
/// draw if it is at distance `≥ d₀` from everything kept, stop after `T`
/// consecutive rejections.
pub fn greedy_pack(space: SpaceSpec, metric: Metric, config: &GreedyConfig) -> Result<Codebook> {
    metric.check(space)?;
    if config.rejection_cap == 0 || !(config.target_distance > 0.0) {
        return Err(Error::InvalidSpec(format!("T={}, d0={}", config.rejection_cap, config.target_distance)));
    }
    let mut rng = rng_for(config.seed, 0);
    let mut points = vec![haar_stiefel_with(space, &mut rng)?];
    let mut rejected = 0;
    while rejected < config.rejection_cap {
        let candidate = haar_stiefel_with(space, &mut rng)?;
        let mut ok = true;
        for p in &points {
            if !metric.at_least(p, &candidate, config.target_distance)? {
                ok = false;
                break;
            }
        }
        if ok {
            points.push(candidate);
            rejected = 0;
        } else {
            rejected += 1;
        }
    }
    Codebook::new(space, metric, points)
}

/// `log₂|C| / n`.
pub fn rate(cb: &Codebook) -> f64 {
    (cb.len() as f64).log2() / cb.space.n() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HammingCheck {
    pub min_distance: f64,
    /// Geodesic radius of the disjoint balls.
    pub radius: f64,
    pub kappa_bar: f64,
    /// `log v^{κ̄}(radius) + log |C|`.
    pub lhs_log: f64,
    /// `log vol M`.
    pub rhs_log: f64,
    pub passes: bool,
}

/// Slack on the log-volume comparison.
pub const HAMMING_LOG_TOL: f64 = 1e-9;

/// Geodesic radius of balls that are disjoint around distinct codewords at
/// distance `≥ d₀`: `d₀/2` on Grassmann (either metric, as `r ≥ d`) and
/// `d₀/(2√2)` for Stiefel chordal (as `r ≥ d/√2`).
pub fn hamming_radius(metric: Metric, d0: f64) -> f64 {
    match metric {
        Metric::GeodesicGrassmann | Metric::ChordalGrassmann => d0 / 2.0,
        Metric::ChordalStiefel => d0 / (2.0 * SQRT_2),
    }
}

/// Sphere-packing necessity `v^{κ̄}(r) · |C| ≤ vol M` with the radius from
/// [`hamming_radius`] clamped to `π/√κ̄`.
pub fn check_hamming(cb: &Codebook, kappa_bar: f64) -> Result<HammingCheck> {
    let d0 = min_distance(cb)?;
    let model = BallModel::new(kappa_bar, cb.space.real_dimension())?;
    let radius = hamming_radius(cb.metric, d0).min(model.max_radius());
    let lhs_log = ball_volume_curved(model, radius)? + (cb.len() as f64).ln();
    let rhs_log = log_vol(cb.space);
    Ok(HammingCheck {
        min_distance: d0,
        radius,
        kappa_bar,
        lhs_log,
        rhs_log,
        passes: lhs_log <= rhs_log + HAMMING_LOG_TOL,
    })
}

/// [`check_hamming`] with the space's default `κ̄`.
pub fn check_hamming_default(cb: &Codebook) -> Result<HammingCheck> {
    check_hamming(cb, default_kappa_bar(cb.space))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GvCheck {
    /// Geodesic radius whose balls cover `M` around a maximal packing.
    pub radius: f64,
    /// `⌊vol M / v⁰(radius)⌋`, saturating.
    pub gv_floor: f64,
    /// Floor from the exact ball volume, available on `G_{1,n}`.
    pub sharper_floor: Option<f64>,
    pub achieved: usize,
    pub passes: bool,
}

/// Covering radius for a maximal packing at distance `d₀`, in geodesic
/// terms: `d₀` for Grassmann geodesic, `(π/2)d₀` for Grassmann chordal and
/// `α d₀` for Stiefel chordal, since `r ≤ α d`.
pub fn gv_radius(space: SpaceSpec, metric: Metric, d0: f64) -> f64 {
    match metric {
        Metric::GeodesicGrassmann => d0,
        Metric::ChordalGrassmann => FRAC_PI_2 * d0,
        Metric::ChordalStiefel => EquivConstants::defaults(space).alpha * d0,
    }
}

/// Existence check: a maximal packing satisfies `|C| ≥ vol M / v(r₀)`, and
/// `v ≤ v⁰`, so `|C| ≥ ⌊vol M / v⁰(r₀)⌋`.
pub fn check_gv(space: SpaceSpec, metric: Metric, d0: f64, achieved: usize) -> Result<GvCheck> {
    metric.check(space)?;
    if !(d0 > 0.0) {
        return Err(Error::InvalidSpec(format!("d0 must be positive, got {d0}")));
    }
    let radius = gv_radius(space, metric, d0);
    let flat = ball_volume_curved(BallModel::flat(space.real_dimension()), radius)?;
    let gv_floor = (log_vol(space) - flat).exp().floor().max(1.0);
    let sharper_floor = if space.family() == Family::Grassmann && space.k() == 1 {
        let theta = radius.min(FRAC_PI_2);
        Some((1.0 / theta.sin().powi(2 * (space.n() as i32 - 1))).floor().max(1.0))
    } else {
        None
    };
    let needed = sharper_floor.map_or(gv_floor, |s| s.max(gv_floor));
    Ok(GvCheck { radius, gv_floor, sharper_floor, achieved, passes: achieved as f64 >= needed })
}

/// Angle sequence `(cos t, sin t)` in `G_{1,2}`, handy for fixtures.
pub fn real_line(t: f64) -> StiefelPoint {
    StiefelPoint::from_frame_unchecked(CMat::from_row_slice(2, 1, &[C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g12() -> SpaceSpec {
        SpaceSpec::grassmann(1, 2).unwrap()
    }

    #[test]
    fn min_distance_examples() {
        let cb = Codebook::new(g12(), Metric::GeodesicGrassmann, vec![real_line(0.0), real_line(FRAC_PI_2)]).unwrap();
        assert!((min_distance(&cb).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let three = [0.0, PI / 3.0, 2.0 * PI / 3.0].map(real_line).to_vec();
        let cb = Codebook::new(g12(), Metric::GeodesicGrassmann, three).unwrap();
        assert!((min_distance(&cb).unwrap() - PI / 3.0).abs() < 1e-14);
        let dup = Codebook::new(g12(), Metric::GeodesicGrassmann, vec![real_line(0.4), real_line(0.4)]).unwrap();
        assert_eq!(min_distance(&dup).unwrap(), 0.0);
        let one = Codebook::new(g12(), Metric::GeodesicGrassmann, vec![real_line(0.4)]).unwrap();
        assert!(matches!(min_distance(&one), Err(Error::TooFewPoints(1))));
    }

    #[test]
    fn greedy_examples() {
        let far = GreedyConfig::new(1, 100, 10.0).unwrap();
        assert_eq!(greedy_pack(g12(), Metric::GeodesicGrassmann, &far).unwrap().len(), 1);
        let cfg = GreedyConfig::new(1, 2000, PI / 3.0).unwrap();
        let cb = greedy_pack(g12(), Metric::GeodesicGrassmann, &cfg).unwrap();
        assert!(cb.len() >= 2);
        assert!(min_distance(&cb).unwrap() >= PI / 3.0 - 1e-12);
        assert_eq!(cb, greedy_pack(g12(), Metric::GeodesicGrassmann, &cfg).unwrap());
    }

    #[test]
    fn metric_must_match_family() {
        let cfg = GreedyConfig::new(1, 10, 0.5).unwrap();
        assert!(greedy_pack(g12(), Metric::ChordalStiefel, &cfg).is_err());
        assert!(greedy_pack(SpaceSpec::stiefel(1, 2).unwrap(), Metric::GeodesicGrassmann, &cfg).is_err());
    }

    #[test]
    fn perfect_packing_of_the_projective_line() {
        let cb = Codebook::new(g12(), Metric::GeodesicGrassmann, vec![real_line(0.0), real_line(FRAC_PI_2)]).unwrap();
        let h = check_hamming(&cb, 4.0).unwrap();
        assert!(h.passes);
        assert!((h.lhs_log - h.rhs_log).abs() < 1e-9);
    }

    #[test]
    fn gv_floor_examples() {
        let c = check_gv(g12(), Metric::GeodesicGrassmann, PI / 3.0, 2).unwrap();
        assert_eq!(c.sharper_floor, Some(1.0));
        assert!(c.passes);
        let big = check_gv(g12(), Metric::GeodesicGrassmann, 10.0, 1).unwrap();
        assert_eq!(big.gv_floor, 1.0);
        assert!(big.passes);
    }

    #[test]
    fn rate_examples() {
        let one = Codebook::new(g12(), Metric::GeodesicGrassmann, vec![real_line(0.0)]).unwrap();
        assert_eq!(rate(&one), 0.0);
        let two = Codebook::new(g12(), Metric::GeodesicGrassmann, vec![real_line(0.0), real_line(1.0)]).unwrap();
        assert_eq!(rate(&two), 0.5);
        let four = [0.0, 0.5, 1.0, 1.5].map(real_line).to_vec();
        assert_eq!(rate(&Codebook::new(g12(), Metric::GeodesicGrassmann, four).unwrap()), 1.0);
    }

    #[test]
    fn json_round_trip() {
        let cfg = GreedyConfig::new(3, 50, 0.8).unwrap();
        let cb = greedy_pack(SpaceSpec::stiefel(2, 3).unwrap(), Metric::ChordalStiefel, &cfg).unwrap();
        let back = Codebook::from_json(&cb.to_json()).unwrap();
        assert_eq!(back, cb);
    }
}
