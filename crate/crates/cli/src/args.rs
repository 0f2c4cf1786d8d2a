use std::path::PathBuf;

use ahs_core::bench::{Algorithm, EmitFormat};
use ahs_core::datasets::parse_count;
use ahs_core::{DatasetSpec, Family, FileFormat};
use clap::{Args, Parser, Subcommand};

/// Adaptive hybrid sorting of 64-bit integers.
///
/// Exit status: 0 success, 2 invalid input or usage, 3 I/O failure,
/// 4 output verification failure.
#[derive(Debug, Parser)]
#[command(name = "ahs", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sort an integer file.
    Sort(SortArgs),
    /// Print the (n, k, H) profile of a file as JSON.
    Profile(ProfileArgs),
    /// Print the strategy decision for a file as JSON, without sorting.
    Explain(ExplainArgs),
    /// Generate a synthetic dataset.
    Gen(GenArgs),
    /// Benchmark sorters over datasets.
    Bench(BenchArgs),
    /// Tune the insertion and counting thresholds.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input file, or `-` for standard input.
    pub input: PathBuf,

    /// File format for input and output.
    #[arg(long, default_value = "text", value_parser = parse_format)]
    pub format: FileFormat,
}

/// Strategy selection settings.
#[derive(Debug, Args)]
pub struct TuningArgs {
    /// Tree-ensemble model file; the classifier decides for large inputs.
    #[arg(long, env = "AHS_MODEL")]
    pub model: Option<PathBuf>,

    /// Worker threads for parallel radix sort.
    #[arg(long, env = "AHS_WORKERS", value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,

    /// Inputs up to this size use insertion sort.
    #[arg(long, value_parser = parse_usize)]
    pub n_insertion: Option<usize>,

    /// Key ranges up to this use counting sort.
    #[arg(long, value_parser = parse_u128)]
    pub k_counting: Option<u128>,

    /// Key ranges above this may use radix sort.
    #[arg(long, value_parser = parse_u128)]
    pub k_radix: Option<u128>,

    /// Radix needs entropy below this fraction of log2 k.
    #[arg(long)]
    pub entropy_coeff: Option<f64>,

    /// Smallest input size handed to the classifier.
    #[arg(long, value_parser = parse_usize)]
    pub ml_min_n: Option<usize>,

    /// Seed for entropy sampling on wide ranges.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SortArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Print the decision trace as JSON on standard error.
    #[arg(long)]
    pub trace: bool,

    #[command(flatten)]
    pub tuning: TuningArgs,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Seed for entropy sampling on wide ranges.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub tuning: TuningArgs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,

    /// Number of elements (accepts `1e6` style).
    #[arg(long, default_value = "1000", value_parser = parse_usize)]
    pub n: usize,

    /// Key range for the distribution families.
    #[arg(long, default_value = "1000", value_parser = parse_u64)]
    pub k: u64,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Zipf exponent.
    #[arg(long, default_value_t = 1.5)]
    pub zipf_s: f64,

    /// Sawtooth period.
    #[arg(long, default_value = "1000", value_parser = parse_u64)]
    pub period: u64,

    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, default_value = "text", value_parser = parse_format)]
    pub format: FileFormat,
}

impl GenArgs {
    pub fn spec(&self) -> DatasetSpec {
        DatasetSpec {
            zipf_s: self.zipf_s,
            sawtooth_period: self.period,
            ..DatasetSpec::new(self.family, self.n, self.k, self.seed)
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Dataset spec such as `uniform:n=1e4:k=500:seed=7` (repeatable).
    /// Without datasets or inputs the default suite runs.
    #[arg(long = "dataset", value_parser = parse_spec)]
    pub datasets: Vec<DatasetSpec>,

    /// Integer file to include (repeatable).
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,

    /// Format of `--input` files.
    #[arg(long, default_value = "text", value_parser = parse_format)]
    pub format: FileFormat,

    /// Comma-separated algorithms: ahs, insertion, counting, radix, quick,
    /// stdsort, pradix.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "ahs,insertion,counting,radix,quick,stdsort",
        value_parser = parse_algorithm
    )]
    pub algorithms: Vec<Algorithm>,

    /// Timed trials per dataset and algorithm.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,

    /// Output format.
    #[arg(long, default_value = "csv", value_parser = parse_emit)]
    pub emit: EmitFormat,

    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Sample peak resident memory per row (Linux).
    #[arg(long)]
    pub rss: bool,

    /// Seed of the default suite.
    #[arg(long = "suite-seed", default_value_t = 42)]
    pub suite_seed: u64,

    #[command(flatten)]
    pub tuning: TuningArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// JSON calibration config; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Search seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Weight of time against memory, in [0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,

    #[arg(long)]
    pub refine_iters: Option<usize>,

    #[arg(long)]
    pub folds: Option<usize>,

    /// Cost runs by wall-clock time instead of operation counts.
    #[arg(long)]
    pub wall_clock: bool,

    /// Timed trials per evaluation with `--wall-clock`.
    #[arg(long)]
    pub trials: Option<usize>,

    /// Last-level cache size for the advisory k_max.
    #[arg(long, value_parser = parse_u64)]
    pub l3_bytes: Option<u64>,

    /// Thread count for the advisory k_max.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub l3_threads: Option<u64>,

    /// Workload dataset spec (repeatable); the desk workload when omitted.
    #[arg(long = "dataset", value_parser = parse_spec)]
    pub datasets: Vec<DatasetSpec>,

    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<FileFormat, String> {
    s.parse().map_err(|_| format!("expected `text` or `binary`, got {s:?}"))
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: ahs_core::Error| e.to_string())
}

fn parse_spec(s: &str) -> Result<DatasetSpec, String> {
    s.parse().map_err(|e: ahs_core::Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.trim().parse().map_err(|e: ahs_core::Error| e.to_string())
}

fn parse_emit(s: &str) -> Result<EmitFormat, String> {
    s.parse().map_err(|e: ahs_core::Error| e.to_string())
}

fn parse_u64(s: &str) -> Result<u64, String> {
    parse_count(s).ok_or_else(|| format!("expected a non-negative integer, got {s:?}"))
}

fn parse_u128(s: &str) -> Result<u128, String> {
    parse_u64(s).map(u128::from)
}

fn parse_usize(s: &str) -> Result<usize, String> {
    parse_u64(s).and_then(|v| usize::try_from(v).map_err(|e| e.to_string()))
}
