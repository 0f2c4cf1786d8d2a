//! Benchmark harness.
//!
//! Each dataset is materialized once. Every algorithm then gets one discarded
//! warm-up run followed by `trials` timed runs on fresh copies; every output,
//! warm-up included, is checked against the standard library's sort before
//! its timing is accepted. Memory is reported as the deterministic
//! `aux_words` counter of [`SortStats`], not OS measurements (optional peak
//! RSS sampling is Linux-only).

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::adaptive::AdaptiveSorter;
use crate::datasets::{generate, DatasetSpec};
use crate::error::{Error, Result};
use crate::features::{key_range, min_max};
use crate::parallel::{hardware_threads, parallel_radix_sort};
use crate::rng::mix;
use crate::sorters::{
    counting_aux_words, counting_sort_capped, insertion_sort, quicksort, radix_sort, SortStats, DEFAULT_COUNTING_CAP,
};
use crate::SortKey;

pub const DEFAULT_TRIALS: usize = 10;
/// Insertion sort rows are skipped above this size.
pub const INSERTION_MAX_N: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ahs,
    Insertion,
    Counting,
    Radix,
    Quick,
    StdSort,
    /// Parallel radix sort, for speedup measurements.
    PRadix,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Ahs,
        Algorithm::Insertion,
        Algorithm::Counting,
        Algorithm::Radix,
        Algorithm::Quick,
        Algorithm::StdSort,
        Algorithm::PRadix,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Ahs => "ahs",
            Algorithm::Insertion => "insertion",
            Algorithm::Counting => "counting",
            Algorithm::Radix => "radix",
            Algorithm::Quick => "quick",
            Algorithm::StdSort => "stdsort",
            Algorithm::PRadix => "pradix",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Bench(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    /// Not run: outside the algorithm's admitted inputs.
    Skipped,
    /// An output failed verification.
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub dataset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<DatasetSpec>,
    pub n: usize,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub median_ms: Option<f64>,
    pub all_trials_ms: Vec<f64>,
    /// `None` for the standard library sort, which is not instrumented.
    pub aux_words_peak: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy_chosen: Option<String>,
    /// Order-independent hash of the input multiset.
    pub checksum: u64,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rss_peak_kb: Option<u64>,
}

/// A named input array.
#[derive(Debug, Clone)]
pub struct BenchDataset {
    pub id: String,
    pub spec: Option<DatasetSpec>,
    pub data: Vec<SortKey>,
}

impl BenchDataset {
    pub fn from_spec(spec: &DatasetSpec) -> Result<Self> {
        Ok(Self {
            id: spec.id(),
            spec: Some(spec.clone()),
            data: generate(spec)?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub trials: usize,
    pub sorter: AdaptiveSorter,
    pub counting_cap: u64,
    pub workers: usize,
    pub sample_rss: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            sorter: AdaptiveSorter::default(),
            counting_cap: DEFAULT_COUNTING_CAP,
            workers: hardware_threads().max(2),
            sample_rss: false,
        }
    }
}

/// Sum of hashed elements; equal for any two orderings of the same multiset.
pub fn multiset_checksum(data: &[SortKey]) -> u64 {
    data.iter().fold(0u64, |acc, &x| acc.wrapping_add(mix(x as u64)))
}

/// True median; the mean of the middle two for an even count.
pub fn median(samples: &[f64]) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

/// Generates each spec and benchmarks it.
pub fn run_bench(suite: &[DatasetSpec], algorithms: &[Algorithm], trials: usize) -> Result<Vec<BenchResult>> {
    let cfg = BenchConfig {
        trials,
        ..BenchConfig::default()
    };
    let datasets = suite.iter().map(BenchDataset::from_spec).collect::<Result<Vec<_>>>()?;
    run_bench_on(&datasets, algorithms, &cfg)
}

pub fn run_bench_on(
    datasets: &[BenchDataset],
    algorithms: &[Algorithm],
    cfg: &BenchConfig,
) -> Result<Vec<BenchResult>> {
    if cfg.trials == 0 {
        return Err(Error::Bench("trials must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(datasets.len() * algorithms.len());
    for ds in datasets {
        let mut reference = ds.data.clone();
        reference.sort();
        let checksum = multiset_checksum(&ds.data);
        for &alg in algorithms {
            rows.push(bench_one(ds, &reference, checksum, alg, cfg));
        }
    }
    Ok(rows)
}

/// One run's output and counters.
struct Run {
    output: Vec<SortKey>,
    stats: Option<SortStats>,
    strategy: Option<String>,
}

fn bench_one(
    ds: &BenchDataset,
    reference: &[SortKey],
    checksum: u64,
    alg: Algorithm,
    cfg: &BenchConfig,
) -> BenchResult {
    let n = ds.data.len();
    let mut row = BenchResult {
        dataset: ds.id.clone(),
        spec: ds.spec.clone(),
        n,
        algorithm: alg,
        trials: cfg.trials,
        median_ms: None,
        all_trials_ms: Vec::new(),
        aux_words_peak: None,
        strategy_chosen: None,
        checksum,
        status: RowStatus::Ok,
        note: None,
        rss_peak_kb: None,
    };

    if alg == Algorithm::Insertion && n > INSERTION_MAX_N {
        row.status = RowStatus::Skipped;
        row.note = Some(format!("insertion sort only admitted for n <= {INSERTION_MAX_N}"));
        return row;
    }
    if alg == Algorithm::Counting {
        if let Some((lo, hi)) = min_max(&ds.data) {
            let words = key_range(lo, hi).map(|k| counting_aux_words(n, k)).unwrap_or(u128::MAX);
            if words > cfg.counting_cap as u128 {
                row.status = RowStatus::Skipped;
                row.aux_words_peak = u64::try_from(words).ok();
                row.note = Some(format!(
                    "counting sort needs {words} words, above cap {}; aux_words_peak is the accounting value",
                    cfg.counting_cap
                ));
                return row;
            }
        }
    }

    if cfg.sample_rss {
        rss::reset_peak();
    }

    let warmup = run_once(&ds.data, alg, cfg);
    if warmup.output != reference {
        row.status = RowStatus::Invalid;
        row.note = Some("warm-up output failed verification".into());
        return row;
    }

    let mut aux_peak = None::<u64>;
    for trial in 0..cfg.trials {
        let input = ds.data.clone();
        let start = Instant::now();
        let run = run_owned(input, alg, cfg);
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        if run.output != reference {
            row.status = RowStatus::Invalid;
            row.note = Some(format!("trial {trial} output failed verification"));
            row.all_trials_ms.clear();
            return row;
        }
        row.all_trials_ms.push(elapsed);
        if let Some(s) = run.stats {
            aux_peak = Some(aux_peak.unwrap_or(0).max(s.aux_words));
        }
        row.strategy_chosen = run.strategy;
    }
    row.median_ms = median(&row.all_trials_ms);
    row.aux_words_peak = aux_peak;
    if cfg.sample_rss {
        row.rss_peak_kb = rss::peak_kb();
    }
    row
}

fn run_once(data: &[SortKey], alg: Algorithm, cfg: &BenchConfig) -> Run {
    run_owned(data.to_vec(), alg, cfg)
}

/// Sorts `v`; this is the timed region.
fn run_owned(mut v: Vec<SortKey>, alg: Algorithm, cfg: &BenchConfig) -> Run {
    let range_of = |v: &[SortKey]| -> (SortKey, SortKey, u128) {
        let (lo, hi) = min_max(v).unwrap_or((0, 0));
        (lo, hi, key_range(lo, hi).unwrap_or(u128::MAX))
    };
    match alg {
        Algorithm::Ahs => {
            let (trace, stats) = cfg.sorter.sort_in_place(&mut v);
            let strategy = match trace.chosen {
                Some(s) => s.to_string(),
                None => serde_json::to_value(trace.source)
                    .ok()
                    .and_then(|s| s.as_str().map(str::to_owned))
                    .unwrap_or_default(),
            };
            Run {
                output: v,
                stats: Some(stats),
                strategy: Some(strategy),
            }
        }
        Algorithm::Insertion => {
            let stats = insertion_sort(&mut v);
            Run {
                output: v,
                stats: Some(stats),
                strategy: None,
            }
        }
        Algorithm::Quick => {
            let stats = quicksort(&mut v);
            Run {
                output: v,
                stats: Some(stats),
                strategy: None,
            }
        }
        Algorithm::StdSort => {
            v.sort();
            Run {
                output: v,
                stats: None,
                strategy: None,
            }
        }
        Algorithm::Counting => {
            if v.is_empty() {
                return Run {
                    output: v,
                    stats: Some(SortStats::default()),
                    strategy: None,
                };
            }
            let (lo, hi, _) = range_of(&v);
            match counting_sort_capped(&v, lo, hi, cfg.counting_cap) {
                Ok((output, stats)) => Run {
                    output,
                    stats: Some(stats),
                    strategy: None,
                },
                // Screened before timing; an empty output fails verification.
                Err(_) => Run {
                    output: Vec::new(),
                    stats: None,
                    strategy: None,
                },
            }
        }
        Algorithm::Radix => {
            let (_, _, k) = range_of(&v);
            let (output, stats) = radix_sort(&v, k);
            Run {
                output,
                stats: Some(stats),
                strategy: None,
            }
        }
        Algorithm::PRadix => {
            let (_, _, k) = range_of(&v);
            let (output, stats) = parallel_radix_sort(&v, k, cfg.workers.max(1));
            Run {
                output,
                stats: Some(stats),
                strategy: None,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmitFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for EmitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(EmitFormat::Csv),
            "json" => Ok(EmitFormat::Json),
            _ => Err(Error::Bench(format!("unknown output format {s:?}"))),
        }
    }
}

pub const CSV_COLUMNS: [&str; 7] = [
    "dataset",
    "algorithm",
    "trials",
    "median_ms",
    "aux_words_peak",
    "strategy",
    "checksum",
];

pub fn emit(results: &[BenchResult], format: EmitFormat) -> Result<Vec<u8>> {
    match format {
        EmitFormat::Json => {
            let mut out = serde_json::to_vec_pretty(results).map_err(|e| Error::Serialize(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        EmitFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::Serialize(e.to_string());
            w.write_record(CSV_COLUMNS).map_err(csv_err)?;
            for r in results {
                w.write_record([
                    r.dataset.clone(),
                    r.algorithm.to_string(),
                    r.trials.to_string(),
                    r.median_ms.map(|m| format!("{m:.6}")).unwrap_or_default(),
                    r.aux_words_peak.map(|a| a.to_string()).unwrap_or_default(),
                    r.strategy_chosen.clone().unwrap_or_default(),
                    r.checksum.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| Error::Serialize(e.to_string()))
        }
    }
}

/// The default desk-scale suite covering every generator family.
pub fn default_suite(seed: u64) -> Vec<DatasetSpec> {
    use crate::datasets::Family::*;
    let mut suite = vec![
        DatasetSpec::new(Uniform, 16, 1000, seed),
        DatasetSpec::new(Uniform, 10_000, 500, seed),
        DatasetSpec::new(Uniform, 10_000, 100_000_000, seed),
        DatasetSpec::new(Uniform, 100_000, 1_000_000_000, seed),
        DatasetSpec::new(Gaussian, 100_000, 1_000_000, seed),
        DatasetSpec::new(Zipf, 100_000, 1000, seed),
        DatasetSpec::new(PresortedAsc, 100_000, 0, seed),
        DatasetSpec::new(PresortedDesc, 100_000, 0, seed),
        DatasetSpec::new(Sawtooth, 100_000, 0, seed),
        DatasetSpec::new(Alternating, 100_000, 1_000_000, seed),
        DatasetSpec::new(Constant, 1000, 0, seed),
    ];
    suite.push(DatasetSpec::new(Empty, 0, 0, seed));
    suite
}

mod rss {
    /// Resets the kernel's peak-RSS watermark (Linux only, best effort).
    pub fn reset_peak() {
        let _ = std::fs::write("/proc/self/clear_refs", "5");
    }

    pub fn peak_kb() -> Option<u64> {
        let status = std::fs::read_to_string("/proc/self/status").ok()?;
        status
            .lines()
            .find_map(|l| l.strip_prefix("VmHWM:"))
            .and_then(|v| v.trim().trim_end_matches("kB").trim().parse().ok())
    }
}
