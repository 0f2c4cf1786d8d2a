//! Threshold calibration.
//!
//! Tunes `(n_insertion, k_counting)` by minimizing
//! `alpha * T + (1 - alpha) * M` over a workload, where `T` is the adaptive
//! sorter's total cost and `M` its total memory footprint (input plus
//! auxiliary words), each divided by the same total for plain quicksort over
//! the same datasets.
//!
//! Search is a full grid pass followed by seeded random proposals drawn from
//! a box around the incumbent that halves every [`SHRINK_EVERY`] iterations.
//! Each candidate is scored as the mean objective over stratified folds of
//! the workload.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::adaptive::AdaptiveSorter;
use crate::bench::{median, BenchDataset};
use crate::datasets::{DatasetSpec, Family};
use crate::decision::{DecisionTrace, Thresholds};
use crate::error::{Error, Result};
use crate::parallel::ParallelPolicy;
use crate::rng::SplitMix64;
use crate::sorters::quicksort;
use crate::SortKey;

pub const SHRINK_EVERY: usize = 20;
pub const KMAX_FLOOR: u64 = 1024;

/// Inclusive arithmetic range `start, start + step, ..., <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub start: u64,
    pub end: u64,
    pub step: u64,
}

impl GridRange {
    pub const fn new(start: u64, end: u64, step: u64) -> Self {
        Self { start, end, step }
    }

    pub fn values(&self) -> Vec<u64> {
        if self.step == 0 || self.start > self.end {
            return Vec::new();
        }
        (self.start..=self.end).step_by(self.step as usize).collect()
    }

    fn clamp(&self, x: f64) -> u64 {
        (x.round().max(self.start as f64) as u64).min(self.end)
    }
}

/// How a sort run is costed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostModel {
    /// `SortStats::work()` plus profiling steps; fully deterministic.
    #[default]
    Operations,
    /// Median wall time over `trials` runs.
    WallClock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationConfig {
    pub alpha: f64,
    pub n_grid: GridRange,
    pub k_grid: GridRange,
    pub refine_iters: usize,
    pub folds: usize,
    pub seed: u64,
    pub cost_model: CostModel,
    /// Timed runs per evaluation under [`CostModel::WallClock`].
    pub trials: usize,
    /// Thresholds other than the two being tuned.
    pub base: Thresholds,
    pub l3_bytes: Option<u64>,
    pub threads: Option<u64>,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            alpha: 0.7,
            n_grid: GridRange::new(10, 50, 5),
            k_grid: GridRange::new(500, 5000, 500),
            refine_iters: 100,
            folds: 5,
            seed: 42,
            cost_model: CostModel::Operations,
            trials: 3,
            base: Thresholds::default(),
            l3_bytes: None,
            threads: None,
        }
    }
}

impl CalibrationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Calibration(m));
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha {} not in [0, 1]", self.alpha));
        }
        if self.n_grid.values().is_empty() || self.k_grid.values().is_empty() {
            return bad("search grids must be nonempty".into());
        }
        if self.n_grid.start == 0 || self.k_grid.start == 0 {
            return bad("grid values must be positive".into());
        }
        if self.folds < 2 {
            return bad(format!("need at least 2 folds, got {}", self.folds));
        }
        if self.cost_model == CostModel::WallClock && self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.threads == Some(0) || self.l3_bytes == Some(0) {
            return bad("l3_bytes and threads must be positive".into());
        }
        self.thresholds(self.n_grid.end, self.k_grid.end).validate()
    }

    fn thresholds(&self, n_t: u64, k_t: u64) -> Thresholds {
        Thresholds {
            n_insertion: n_t as usize,
            k_counting: k_t as u128,
            ..self.base
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: u64,
    pub k: u64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub best_n: u64,
    pub best_k: u64,
    /// Mean fold objective at the returned point.
    pub objective: f64,
    pub per_fold_objectives: Vec<f64>,
    /// Distinct threshold pairs scored.
    pub evaluations: usize,
    pub grid: Vec<GridPoint>,
    pub cost_model: CostModel,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub advisory_kmax: Option<u64>,
}

/// `alpha * t + (1 - alpha) * m`.
pub fn weighted_objective(t: f64, m: f64, alpha: f64) -> f64 {
    alpha * t + (1.0 - alpha) * m
}

/// Cache-derived counting-sort ceiling: `l3_bytes / (4 * threads)`, at
/// least [`KMAX_FLOOR`].
pub fn hardware_kmax(l3_bytes: u64, threads: u64) -> u64 {
    (l3_bytes / (4 * threads.max(1))).max(KMAX_FLOOR)
}

/// Objective of thresholds `(n_t, k_t)` over the whole workload.
pub fn evaluate_objective(
    n_t: u64,
    k_t: u64,
    workload: &[BenchDataset],
    alpha: f64,
    cost_model: CostModel,
) -> Result<f64> {
    if workload.is_empty() {
        return Err(Error::Calibration("empty workload".into()));
    }
    let cfg = CalibrationConfig {
        alpha,
        cost_model,
        ..CalibrationConfig::default()
    };
    let th = cfg.thresholds(n_t, k_t);
    th.validate()?;
    let eval = Evaluator::new(workload, &cfg);
    let terms = eval.terms(&th);
    let all: Vec<usize> = (0..workload.len()).collect();
    Ok(objective_over(&terms, &all, alpha))
}

pub fn calibrate(cfg: &CalibrationConfig, workload: &[BenchDataset]) -> Result<CalibrationResult> {
    cfg.validate()?;
    if workload.len() < cfg.folds {
        return Err(Error::Calibration(format!(
            "workload of {} datasets is smaller than {} folds",
            workload.len(),
            cfg.folds
        )));
    }
    let folds = stratified_folds(workload, cfg.folds);
    let eval = Evaluator::new(workload, cfg);

    let mut scored: HashMap<(u64, u64), (f64, Vec<f64>)> = HashMap::new();
    let mut score = |n: u64, k: u64| -> (f64, Vec<f64>) {
        scored
            .entry((n, k))
            .or_insert_with(|| {
                let terms = eval.terms(&cfg.thresholds(n, k));
                let per_fold: Vec<f64> = folds.iter().map(|f| objective_over(&terms, f, cfg.alpha)).collect();
                (mean(&per_fold), per_fold)
            })
            .clone()
    };

    let mut best: Option<(f64, u64, u64, Vec<f64>)> = None;
    let offer = |obj: f64, n: u64, k: u64, folds: Vec<f64>, best: &mut Option<(f64, u64, u64, Vec<f64>)>| {
        let better = match best {
            None => true,
            Some((bo, bn, bk, _)) => obj.total_cmp(bo).then(n.cmp(bn)).then(k.cmp(bk)).is_lt(),
        };
        if better {
            *best = Some((obj, n, k, folds));
        }
    };

    let mut grid = Vec::new();
    for n in cfg.n_grid.values() {
        for k in cfg.k_grid.values() {
            let (obj, per_fold) = score(n, k);
            grid.push(GridPoint { n, k, objective: obj });
            offer(obj, n, k, per_fold, &mut best);
        }
    }

    let mut rng = SplitMix64::new(cfg.seed);
    let mut half_n = (cfg.n_grid.end - cfg.n_grid.start) as f64 / 2.0;
    let mut half_k = (cfg.k_grid.end - cfg.k_grid.start) as f64 / 2.0;
    for iter in 0..cfg.refine_iters {
        if iter > 0 && iter % SHRINK_EVERY == 0 {
            half_n /= 2.0;
            half_k /= 2.0;
        }
        let (_, inc_n, inc_k, _) = best.as_ref().expect("grid is nonempty");
        let n = cfg.n_grid.clamp(*inc_n as f64 + half_n * (2.0 * rng.next_f64() - 1.0));
        let k = cfg.k_grid.clamp(*inc_k as f64 + half_k * (2.0 * rng.next_f64() - 1.0));
        let (obj, per_fold) = score(n, k);
        offer(obj, n, k, per_fold, &mut best);
    }

    let (objective, best_n, best_k, per_fold_objectives) = best.expect("grid is nonempty");
    if !objective.is_finite() {
        return Err(Error::Calibration(format!("non-finite objective {objective}")));
    }
    Ok(CalibrationResult {
        best_n,
        best_k,
        objective,
        per_fold_objectives,
        evaluations: scored.len(),
        grid,
        cost_model: cfg.cost_model,
        seed: cfg.seed,
        advisory_kmax: cfg.l3_bytes.zip(cfg.threads).map(|(l3, t)| hardware_kmax(l3, t)),
    })
}

/// Dataset category used for stratification.
pub fn category(ds: &BenchDataset) -> String {
    match &ds.spec {
        Some(spec) => spec.family.as_str().to_owned(),
        None => "file".to_owned(),
    }
}

/// Splits dataset indices into `k` folds, dealing each category's members
/// round-robin so every category spreads across folds.
pub fn stratified_folds(workload: &[BenchDataset], k: usize) -> Vec<Vec<usize>> {
    let mut by_cat: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, ds) in workload.iter().enumerate() {
        by_cat.entry(category(ds)).or_default().push(i);
    }
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for members in by_cat.values() {
        for &i in members {
            folds[next % k].push(i);
            next += 1;
        }
    }
    folds
}

/// The mixed desk-scale workload: small arrays around the insertion
/// threshold and mid-size arrays around the counting threshold.
pub fn desk_workload(seed: u64) -> Vec<DatasetSpec> {
    let mut specs = Vec::new();
    let mut s = seed;
    let mut push = |family, n, k| {
        specs.push(DatasetSpec::new(family, n, k, s));
        s = s.wrapping_add(1);
    };
    for family in [Family::Uniform, Family::Gaussian, Family::Zipf] {
        for n in [16, 32, 48] {
            push(family, n, 10_000);
        }
        for n in [5_000, 20_000] {
            for k in [400, 900, 1800, 3500, 8000] {
                push(family, n, k);
            }
        }
    }
    for n in [30, 5_000] {
        push(Family::Sawtooth, n, 0);
        push(Family::PresortedAsc, n, 0);
        push(Family::Alternating, n, 4000);
    }
    specs
}

/// Per-dataset `[adaptive cost, quicksort cost, adaptive words, quicksort words]`.
type Terms = Vec<[f64; 4]>;

/// Weighted objective over the datasets in `idx`. Cost and memory are each
/// normalized at the workload level: total adaptive over total quicksort.
fn objective_over(terms: &Terms, idx: &[usize], alpha: f64) -> f64 {
    let mut sum = [0.0f64; 4];
    for &i in idx {
        for (s, x) in sum.iter_mut().zip(terms[i]) {
            *s += x;
        }
    }
    weighted_objective(ratio(sum[0], sum[1]), ratio(sum[2], sum[3]), alpha)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Quicksort-only reference cost of one dataset.
struct Baseline {
    cost: f64,
    words: f64,
}

struct Evaluator<'a> {
    workload: &'a [BenchDataset],
    baselines: Vec<Baseline>,
    cost_model: CostModel,
    trials: usize,
}

impl<'a> Evaluator<'a> {
    fn new(workload: &'a [BenchDataset], cfg: &CalibrationConfig) -> Self {
        let trials = cfg.trials.max(1);
        let baselines = workload
            .iter()
            .map(|ds| {
                let mut v = ds.data.clone();
                let stats = quicksort(&mut v);
                let cost = match cfg.cost_model {
                    CostModel::Operations => stats.work() as f64,
                    CostModel::WallClock => time_ns(&ds.data, trials, |v| {
                        quicksort(v);
                    }),
                };
                Baseline {
                    cost,
                    words: (ds.data.len() as u64 + stats.aux_words) as f64,
                }
            })
            .collect();
        Self {
            workload,
            baselines,
            cost_model: cfg.cost_model,
            trials,
        }
    }

    fn terms(&self, th: &Thresholds) -> Terms {
        let sorter = AdaptiveSorter::new(*th)
            .expect("validated thresholds")
            .with_parallel(ParallelPolicy::disabled());
        self.workload
            .iter()
            .zip(&self.baselines)
            .map(|(ds, base)| {
                let mut v = ds.data.clone();
                let (trace, stats) = sorter.sort_in_place(&mut v);
                let cost = match self.cost_model {
                    CostModel::Operations => (stats.work() + profile_cost(&trace)) as f64,
                    CostModel::WallClock => time_ns(&ds.data, self.trials, |v| {
                        sorter.sort_in_place(v);
                    }),
                };
                let words = (ds.data.len() as u64 + stats.aux_words) as f64;
                [cost, base.cost, words, base.words]
            })
            .collect()
    }
}

/// `x / baseline` with both floored at one unit, so empty workloads give 1.
fn ratio(x: f64, baseline: f64) -> f64 {
    x.max(1.0) / baseline.max(1.0)
}

/// Steps spent profiling: one min/max scan plus one pass over the entropy
/// sample.
fn profile_cost(trace: &DecisionTrace) -> u64 {
    let p = &trace.profile;
    p.n as u64 + p.entropy.as_ref().map_or(0, |e| e.sample_size as u64)
}

fn time_ns(data: &[SortKey], trials: usize, mut f: impl FnMut(&mut [SortKey])) -> f64 {
    let samples: Vec<f64> = (0..trials)
        .map(|_| {
            let mut v = data.to_vec();
            let start = Instant::now();
            f(&mut v);
            start.elapsed().as_nanos() as f64
        })
        .collect();
    median(&samples).unwrap_or(0.0)
}
