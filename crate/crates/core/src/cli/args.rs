use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sgbounds", version, about = "Packing bounds and geometry on complex Stiefel and Grassmann manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate GV and Hamming radii over a (k, n, R) grid.
    #[command(
        name = "bounds-table",
        long_about = "Tabulate GV lower and Hamming upper minimal-distance radii over a (k, n, R) grid.\n\n\
CSV columns: family,k,n,R,D,gv_lower,hamming_upper,theorem_floor,coding_lower,coding_upper\n\
hamming_upper and coding_upper read INFEASIBLE when no model-sphere radius reaches the target volume.\n\
Invalid (k, n) pairs of a range are skipped. Lines starting with '#' carry metadata."
    )]
    BoundsTable(BoundsTableArgs),
    /// Total volume and ball volumes at given radii.
    #[command(long_about = "Total volume and ball volumes (natural logs) at the given radii.\n\n\
CSV columns: family,k,n,D,r,log_vol,log_ball_flat,log_ball_kappa_bar,log_ball_exact,exact_rel_error\n\
The exact columns are NA outside the Grassmann family or beyond the radius domain; log_ball_kappa_bar is NA beyond pi/sqrt(kappa_bar).")]
    Volume(VolumeArgs),
    /// Pairwise distances within a codebook file.
    #[command(
        long_about = "Pairwise distances within a codebook file.\n\nCSV columns: i,j,distance\nA trailing '# min_distance=' line gives the minimum."
    )]
    Distance(DistanceArgs),
    /// Sample sectional curvatures of random tangent planes.
    #[command(
        name = "curvature-scan",
        long_about = "Sample sectional curvatures of random tangent planes and compare with the curvature cap.\n\n\
CSV columns: family,k,n,samples,kappa_bar,min_k,max_k,mean_k,violations"
    )]
    CurvatureScan(CurvatureScanArgs),
    /// Histogram of 1 - kappa over random Stiefel tangents.
    #[command(
        name = "kappa-hist",
        long_about = "Histogram of 1 - kappa_emp over random Stiefel tangents with Frobenius norm delta.\n\n\
CSV columns: bin_left,bin_right,count\n\
Metadata lines report mean_one_minus_kappa, min and max."
    )]
    KappaHist(KappaHistArgs),
    /// Build a greedy packing and check it.
    #[command(
        long_about = "Build a packing by greedy rejection sampling and check the Hamming and GV inequalities.\n\n\
Writes the codebook JSON to --out and the check report to <out>.report.json.\n\
Exit status 1 when the Hamming inequality fails."
    )]
    Pack(PackArgs),
    /// Check a codebook file against the Hamming and GV inequalities.
    #[command(
        long_about = "Check a codebook file against the Hamming and GV inequalities and write a JSON report.\n\nExit status 1 when the Hamming inequality fails."
    )]
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Stiefel,
    Grassmann,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Deterministic,
    MonteCarlo,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsTableArgs {
    #[arg(long, value_enum, default_value = "both")]
    pub family: FamilyArg,
    /// Single value or inclusive range a..b.
    #[arg(long, value_parser = parse_range, default_value = "1..4")]
    pub k: RangeInclusive<usize>,
    #[arg(long, value_parser = parse_range, default_value = "1..8")]
    pub n: RangeInclusive<usize>,
    /// Comma-separated rates in bits per time step.
    #[arg(long, value_parser = parse_rates, default_value = "1,10")]
    pub rate: Rates,
    /// Curvature cap; defaults to 2, 5/2 or 4 by space.
    #[arg(long = "kappa-bar")]
    pub kappa_bar: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct VolumeArgs {
    #[arg(long, value_enum, default_value = "grassmann")]
    pub family: FamilyArg,
    #[arg(long, value_parser = parse_range, default_value = "1")]
    pub k: RangeInclusive<usize>,
    #[arg(long, value_parser = parse_range, default_value = "2")]
    pub n: RangeInclusive<usize>,
    /// Comma-separated geodesic radii.
    #[arg(long, value_parser = parse_radii, default_value = "0.5")]
    pub r: Rates,
    #[arg(long = "kappa-bar")]
    pub kappa_bar: Option<f64>,
    #[arg(long, value_enum, default_value = "deterministic")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct DistanceArgs {
    /// Codebook JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Metric override: chordal-stiefel, chordal-grassmann or geodesic-grassmann.
    #[arg(long)]
    pub metric: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct CurvatureScanArgs {
    #[arg(long, value_enum, default_value = "both")]
    pub family: FamilyArg,
    #[arg(long, value_parser = parse_range, default_value = "2")]
    pub k: RangeInclusive<usize>,
    #[arg(long, value_parser = parse_range, default_value = "2..5")]
    pub n: RangeInclusive<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "kappa-bar")]
    pub kappa_bar: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct KappaHistArgs {
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Frobenius norm of the sampled tangents.
    #[arg(long, default_value_t = 1.25)]
    pub delta: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct PackArgs {
    #[arg(long, value_enum, default_value = "grassmann")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Metric; defaults to chordal on Stiefel, geodesic on Grassmann.
    #[arg(long)]
    pub metric: Option<String>,
    /// Target minimal distance.
    #[arg(long)]
    pub d0: f64,
    /// Consecutive rejections that end the run.
    #[arg(long = "T", default_value_t = crate::packing::DEFAULT_REJECTION_CAP)]
    pub rejection_cap: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long = "kappa-bar")]
    pub kappa_bar: Option<f64>,
    /// Codebook JSON file; the report goes to <out>.report.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Codebook JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Target distance for the GV comparison; the codebook's minimum distance when omitted.
    #[arg(long)]
    pub d0: Option<f64>,
    #[arg(long = "kappa-bar")]
    pub kappa_bar: Option<f64>,
    /// Report file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parsed comma-separated list of positive reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates(pub Vec<f64>);

pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..=b)
}

fn parse_positive_list(s: &str, what: &str) -> Result<Rates, String> {
    let values = s
        .split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().map_err(|e| format!("'{t}': {e}"))?;
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(format!("{what} must be positive, got {v}"))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(format!("no {what} given"));
    }
    Ok(Rates(values))
}

pub fn parse_rates(s: &str) -> Result<Rates, String> {
    parse_positive_list(s, "rate")
}

pub fn parse_radii(s: &str) -> Result<Rates, String> {
    parse_positive_list(s, "radius")
}
