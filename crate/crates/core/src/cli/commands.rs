use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::args::{
    BoundsTableArgs, CheckArgs, Command, CurvatureScanArgs, DistanceArgs, FamilyArg, Format, KappaHistArgs, MethodArg,
    PackArgs, VolumeArgs,
};
use super::output::{emit, json, num, opt_num, read, Csv};
use super::{CliError, EXIT_CHECK_FAILED, EXIT_OK};
use crate::bounds::{bound_report, default_kappa_bar, BoundQuery, BoundReport, EquivConstants};
use crate::equivalence::kappa_histogram;
use crate::manifold::{rng_for, sectional_curvature, Family, HorizontalTangent, SpaceSpec};
use crate::packing::{
    check_gv, check_hamming, greedy_pack, min_distance, rate, Codebook, GreedyConfig, GvCheck, HammingCheck, Metric,
};
use crate::volumes::{
    ball_volume_curved, exact_grassmann_ball_with_samples, log_vol, BallMethod, BallModel, DETERMINISTIC_MAX_K,
};
use crate::Error;

const INFEASIBLE: &str = "INFEASIBLE";
const NA: &str = "NA";

pub fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::BoundsTable(a) => bounds_table(a),
        Command::Volume(a) => volume(a),
        Command::Distance(a) => distance(a),
        Command::CurvatureScan(a) => curvature_scan(a),
        Command::KappaHist(a) => kappa_hist(a),
        Command::Pack(a) => pack(a),
        Command::Check(a) => check(a),
    }
}

fn families(f: FamilyArg) -> &'static [Family] {
    match f {
        FamilyArg::Stiefel => &[Family::Stiefel],
        FamilyArg::Grassmann => &[Family::Grassmann],
        FamilyArg::Both => &[Family::Stiefel, Family::Grassmann],
    }
}

fn single_family(f: FamilyArg) -> Result<Family, CliError> {
    match f {
        FamilyArg::Stiefel => Ok(Family::Stiefel),
        FamilyArg::Grassmann => Ok(Family::Grassmann),
        FamilyArg::Both => Err(CliError::Usage("this subcommand needs a single --family".into())),
    }
}

/// Valid spaces of the grid in family, k, n order.
fn grid(
    family: FamilyArg,
    k: &std::ops::RangeInclusive<usize>,
    n: &std::ops::RangeInclusive<usize>,
) -> Result<Vec<SpaceSpec>, CliError> {
    let spaces: Vec<SpaceSpec> = families(family)
        .iter()
        .flat_map(|&f| k.clone().flat_map(move |k| n.clone().filter_map(move |n| SpaceSpec::new(f, k, n).ok())))
        .collect();
    if spaces.is_empty() {
        return Err(CliError::Usage("no valid (k, n) pair in the requested ranges".into()));
    }
    Ok(spaces)
}

fn check_kappa_bar(kappa_bar: Option<f64>) -> Result<(), CliError> {
    match kappa_bar {
        Some(kb) if !(kb > 0.0 && kb.is_finite()) => {
            Err(CliError::Usage(format!("--kappa-bar must be positive, got {kb}")))
        }
        _ => Ok(()),
    }
}

fn bounds_table(a: BoundsTableArgs) -> Result<i32, CliError> {
    check_kappa_bar(a.kappa_bar)?;
    let spaces = grid(a.family, &a.k, &a.n)?;
    let constants_for = |space: SpaceSpec| -> Result<EquivConstants, Error> {
        let d = EquivConstants::defaults(space);
        if a.alpha.is_none() && a.beta.is_none() {
            return Ok(d);
        }
        EquivConstants::new(a.alpha.unwrap_or(d.alpha), a.beta.unwrap_or(d.beta), d.mu, false)
    };
    let queries: Vec<(SpaceSpec, f64)> = spaces.iter().flat_map(|&s| a.rate.0.iter().map(move |&r| (s, r))).collect();
    let reports = queries
        .par_iter()
        .map(|&(space, r)| bound_report(&BoundQuery::new(space, r)?, a.kappa_bar, Some(constants_for(space)?)))
        .collect::<Result<Vec<BoundReport>, Error>>()?;

    let text = match a.output.format {
        Format::Json => json(&reports),
        Format::Csv => {
            let mut csv = Csv::new("family,k,n,R,D,gv_lower,hamming_upper,theorem_floor,coding_lower,coding_upper");
            if a.kappa_bar.is_some() || a.alpha.is_some() || a.beta.is_some() {
                csv.meta(format!(
                    "overrides: kappa_bar={} alpha={} beta={}",
                    opt_num(a.kappa_bar, "default"),
                    opt_num(a.alpha, "default"),
                    opt_num(a.beta, "default")
                ));
            }
            if reports.iter().any(|r| r.space.family() == Family::Stiefel && !r.space.is_unitary() && a.alpha.is_none())
            {
                csv.meta("Stiefel k<n coding_lower uses the empirical alpha = pi/(2*0.9)");
            }
            for r in &reports {
                csv.row(&[
                    r.space.family().to_string(),
                    r.space.k().to_string(),
                    r.space.n().to_string(),
                    num(r.rate),
                    r.dimension.to_string(),
                    num(r.gv_lower),
                    opt_num(r.hamming_upper, INFEASIBLE),
                    num(r.theorem_floor),
                    num(r.coding_lower),
                    opt_num(r.coding_upper, INFEASIBLE),
                ]);
            }
            csv.finish()
        }
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct VolumeRow {
    space: SpaceSpec,
    dimension: usize,
    r: f64,
    log_vol: f64,
    log_ball_flat: f64,
    kappa_bar: f64,
    log_ball_kappa_bar: Option<f64>,
    log_ball_exact: Option<f64>,
    exact_rel_error: Option<f64>,
}

fn volume(a: VolumeArgs) -> Result<i32, CliError> {
    check_kappa_bar(a.kappa_bar)?;
    let spaces = grid(a.family, &a.k, &a.n)?;
    let method = match a.method {
        MethodArg::Deterministic => BallMethod::Deterministic,
        MethodArg::MonteCarlo => BallMethod::MonteCarlo,
    };
    let mut rows = Vec::new();
    for space in spaces {
        let d = space.real_dimension();
        let kappa_bar = a.kappa_bar.unwrap_or_else(|| default_kappa_bar(space));
        let model = BallModel::new(kappa_bar, d)?;
        for &r in &a.r.0 {
            let curved = if r <= model.max_radius() { Some(ball_volume_curved(model, r)?) } else { None };
            let exact = match space.family() {
                Family::Grassmann
                    if r <= crate::volumes::grassmann_max_radius(space.k())
                        && (method == BallMethod::MonteCarlo || space.k() <= DETERMINISTIC_MAX_K) =>
                {
                    Some(exact_grassmann_ball_with_samples(space.k(), space.n(), r, method, a.seed, a.samples)?)
                }
                _ => None,
            };
            rows.push(VolumeRow {
                space,
                dimension: d,
                r,
                log_vol: log_vol(space),
                log_ball_flat: ball_volume_curved(BallModel::flat(d), r)?,
                kappa_bar,
                log_ball_kappa_bar: curved,
                log_ball_exact: exact.as_ref().map(|e| e.log_volume),
                exact_rel_error: exact.as_ref().map(|e| e.rel_error),
            });
        }
    }
    let text = match a.output.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut csv =
                Csv::new("family,k,n,D,r,log_vol,log_ball_flat,log_ball_kappa_bar,log_ball_exact,exact_rel_error");
            csv.meta(format!(
                "method={} samples={} seed={}",
                if method == BallMethod::MonteCarlo { "monte-carlo" } else { "deterministic" },
                a.samples,
                a.seed
            ));
            for row in &rows {
                csv.row(&[
                    row.space.family().to_string(),
                    row.space.k().to_string(),
                    row.space.n().to_string(),
                    row.dimension.to_string(),
                    num(row.r),
                    num(row.log_vol),
                    num(row.log_ball_flat),
                    opt_num(row.log_ball_kappa_bar, NA),
                    opt_num(row.log_ball_exact, NA),
                    opt_num(row.exact_rel_error, NA),
                ]);
            }
            csv.finish()
        }
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn load_codebook(path: &Path) -> Result<Codebook, CliError> {
    Ok(Codebook::from_json(&read(path)?)?)
}

fn parse_metric(s: &str) -> Result<Metric, CliError> {
    s.parse::<Metric>().map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Debug, Serialize)]
struct DistanceReport {
    metric: Metric,
    pairs: Vec<(usize, usize, f64)>,
    min_distance: Option<f64>,
}

fn distance(a: DistanceArgs) -> Result<i32, CliError> {
    let mut cb = load_codebook(&a.input)?;
    if let Some(m) = a.metric.as_deref() {
        cb = Codebook::new(cb.space(), parse_metric(m)?, cb.points().to_vec())?;
    }
    let metric = cb.metric();
    let pts = cb.points();
    let mut pairs = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            pairs.push((i, j, metric.distance(&pts[i], &pts[j])?));
        }
    }
    let min = pairs.iter().map(|p| p.2).reduce(f64::min);
    let text = match a.output.format {
        Format::Json => json(&DistanceReport { metric, pairs, min_distance: min }),
        Format::Csv => {
            let mut csv = Csv::new("i,j,distance");
            csv.meta(format!("space={} metric={metric} points={}", cb.space(), pts.len()));
            for (i, j, d) in &pairs {
                csv.row(&[i.to_string(), j.to_string(), num(*d)]);
            }
            let mut text = csv.finish();
            text.push_str(&format!("# min_distance={}\n", opt_num(min, NA)));
            text
        }
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct CurvatureRow {
    space: SpaceSpec,
    samples: usize,
    kappa_bar: f64,
    min: f64,
    max: f64,
    mean: f64,
    violations: usize,
}

/// Slack on the curvature range check.
const CURVATURE_TOL: f64 = 1e-9;

fn curvature_scan(a: CurvatureScanArgs) -> Result<i32, CliError> {
    check_kappa_bar(a.kappa_bar)?;
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let spaces = grid(a.family, &a.k, &a.n)?;
    let mut rows = Vec::new();
    for space in spaces {
        let kappa_bar = a.kappa_bar.unwrap_or_else(|| default_kappa_bar(space));
        let values = (0..a.samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_for(a.seed, i);
                let x = HorizontalTangent::random_unit(space, &mut rng);
                let y = HorizontalTangent::random_unit(space, &mut rng);
                sectional_curvature(space, &x, &y)
            })
            .collect::<Result<Vec<f64>, Error>>()?;
        rows.push(CurvatureRow {
            space,
            samples: a.samples,
            kappa_bar,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: values.iter().sum::<f64>() / values.len() as f64,
            violations: values.iter().filter(|&&k| k < -CURVATURE_TOL || k > kappa_bar + CURVATURE_TOL).count(),
        });
    }
    let text = match a.output.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut csv = Csv::new("family,k,n,samples,kappa_bar,min_k,max_k,mean_k,violations");
            csv.meta(format!("seed={}", a.seed));
            for r in &rows {
                csv.row(&[
                    r.space.family().to_string(),
                    r.space.k().to_string(),
                    r.space.n().to_string(),
                    r.samples.to_string(),
                    num(r.kappa_bar),
                    num(r.min),
                    num(r.max),
                    num(r.mean),
                    r.violations.to_string(),
                ]);
            }
            csv.finish()
        }
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn kappa_hist(a: KappaHistArgs) -> Result<i32, CliError> {
    let space = SpaceSpec::stiefel(a.k, a.n)?;
    let h = kappa_histogram(space, a.delta, a.samples, a.seed)?;
    let text = match a.output.format {
        Format::Json => json(&h),
        Format::Csv => {
            let mut csv = Csv::new("bin_left,bin_right,count");
            csv.meta(format!("space={space} delta={} samples={} seed={}", num(h.delta), h.samples, h.seed));
            csv.meta(format!("mean_one_minus_kappa={}", num(h.mean_one_minus_kappa)));
            csv.meta(format!("min_one_minus_kappa={}", num(h.min)));
            csv.meta(format!("max_one_minus_kappa={}", num(h.max)));
            csv.meta(format!("kappa_below_one={}", h.kappa_below_one));
            for (i, c) in h.bin_counts.iter().enumerate() {
                csv.row(&[num(h.bin_edges[i]), num(h.bin_edges[i + 1]), c.to_string()]);
            }
            csv.finish()
        }
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct CheckReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<&'static str>,
    space: SpaceSpec,
    metric: Metric,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rejection_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target_distance: Option<f64>,
    size: usize,
    rate: f64,
    min_distance: Option<f64>,
    notes: Vec<String>,
    hamming: Option<HammingCheck>,
    gv: Option<GvCheck>,
    passes: bool,
}

fn check_report(cb: &Codebook, target: Option<f64>, kappa_bar: Option<f64>) -> Result<CheckReport, CliError> {
    check_kappa_bar(kappa_bar)?;
    let kappa_bar = kappa_bar.unwrap_or_else(|| default_kappa_bar(cb.space()));
    let mut notes = Vec::new();
    let (min, hamming) = match min_distance(cb) {
        Ok(d) => (Some(d), Some(check_hamming(cb, kappa_bar)?)),
        Err(e @ Error::TooFewPoints(_)) => {
            notes.push(format!("min_distance: {e}"));
            (None, None)
        }
        Err(e) => return Err(e.into()),
    };
    let gv = match target.or(min) {
        Some(d0) => Some(check_gv(cb.space(), cb.metric(), d0, cb.len())?),
        None => None,
    };
    if let Some(g) = &gv {
        if !g.passes {
            notes.push("achieved size is below the GV floor".into());
        }
    }
    let passes = hamming.as_ref().is_none_or(|h| h.passes);
    Ok(CheckReport {
        method: None,
        space: cb.space(),
        metric: cb.metric(),
        seed: None,
        rejection_cap: None,
        target_distance: target,
        size: cb.len(),
        rate: rate(cb),
        min_distance: min,
        notes,
        hamming,
        gv,
        passes,
    })
}

fn report_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".report.json");
    PathBuf::from(s)
}

fn pack(a: PackArgs) -> Result<i32, CliError> {
    let space = SpaceSpec::new(single_family(a.family)?, a.k, a.n)?;
    let metric = match a.metric.as_deref() {
        Some(m) => parse_metric(m)?,
        None => Metric::default_for(space.family()),
    };
    let config = GreedyConfig::new(a.seed, a.rejection_cap, a.d0)?;
    let cb = greedy_pack(space, metric, &config)?;
    let mut report = check_report(&cb, Some(a.d0), a.kappa_bar)?;
    report.method = Some("greedy rejection sampling");
    report.seed = Some(a.seed);
    report.rejection_cap = Some(a.rejection_cap);
    emit(Some(&a.out), &cb.to_json())?;
    emit(Some(&report_path(&a.out)), &json(&report))?;
    Ok(if report.passes { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn check(a: CheckArgs) -> Result<i32, CliError> {
    let cb = load_codebook(&a.input)?;
    if let Some(d0) = a.d0 {
        if !(d0 > 0.0) {
            return Err(CliError::Usage(format!("--d0 must be positive, got {d0}")));
        }
    }
    let report = check_report(&cb, a.d0, a.kappa_bar)?;
    emit(a.out.as_deref(), &json(&report))?;
    Ok(if report.passes { EXIT_OK } else { EXIT_CHECK_FAILED })
}
