mod args;

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use ahs_core::bench::{default_suite, emit, run_bench_on, BenchConfig, BenchDataset, RowStatus};
use ahs_core::calibration::{calibrate, desk_workload, CalibrationConfig, CostModel};
use ahs_core::datasets::{decode, encode, generate};
use ahs_core::features::{compute_profile_with, ProfileOptions};
use ahs_core::sorters::is_sorted;
use ahs_core::{load_model, AdaptiveSorter, Error, ParallelPolicy, Thresholds};
use clap::Parser;
use serde::Serialize;

use args::{
    BenchArgs, CalibrateArgs, Cli, Command, ExplainArgs, GenArgs, InputArgs, ProfileArgs, SortArgs, TuningArgs,
};

/// A failed command and its exit status.
#[derive(Debug)]
enum Failure {
    Input(String),
    Io(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Io(_) => 3,
            Failure::Verify(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Io(m) | Failure::Verify(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Sort(a) => cmd_sort(a),
        Command::Profile(a) => cmd_profile(a),
        Command::Explain(a) => cmd_explain(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Calibrate(a) => cmd_calibrate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ahs: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn read_input(input: &InputArgs) -> Result<Vec<i64>, Failure> {
    if input.input.as_os_str() == "-" {
        let mut bytes = Vec::new();
        io::stdin()
            .read_to_end(&mut bytes)
            .map_err(|e| Failure::Io(format!("<stdin>: {e}")))?;
        Ok(decode(&bytes, input.format, Path::new("<stdin>"))?)
    } else {
        let bytes = std::fs::read(&input.input).map_err(|e| Failure::Io(format!("{}: {e}", input.input.display())))?;
        Ok(decode(&bytes, input.format, &input.input)?)
    }
}

fn write_output(out: Option<&PathBuf>, bytes: &[u8]) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::Io(format!("<stdout>: {e}")))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

/// Builds the sorter from flags; everything is validated before input is read.
fn build_sorter(t: &TuningArgs) -> Result<AdaptiveSorter, Failure> {
    let d = Thresholds::default();
    let th = Thresholds {
        n_insertion: t.n_insertion.unwrap_or(d.n_insertion),
        k_counting: t.k_counting.unwrap_or(d.k_counting),
        k_radix: t.k_radix.unwrap_or(d.k_radix),
        entropy_coeff: t.entropy_coeff.unwrap_or(d.entropy_coeff),
        ml_min_n: t.ml_min_n.unwrap_or(d.ml_min_n),
    };
    let mut policy = ParallelPolicy::default();
    if let Some(w) = t.threads {
        policy.workers = w as usize;
    }
    let model = match &t.model {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let model = load_model(&bytes).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            Some(Arc::new(model))
        }
        None => None,
    };
    let mut sorter = AdaptiveSorter::new(th)?.with_model(model).with_parallel(policy);
    if let Some(seed) = t.seed {
        sorter = sorter.with_entropy_seed(seed);
    }
    Ok(sorter)
}

fn cmd_sort(a: SortArgs) -> CmdResult {
    let sorter = build_sorter(&a.tuning)?;
    let mut data = read_input(&a.input)?;
    let (trace, _) = sorter.sort_in_place(&mut data);
    if !is_sorted(&data) {
        return Err(Failure::Verify("output is not in ascending order".into()));
    }
    write_output(a.out.as_ref(), &encode(&data, a.input.format))?;
    if a.trace {
        let mut stderr = io::stderr().lock();
        stderr
            .write_all(&to_json(&trace))
            .map_err(|e| Failure::Io(format!("<stderr>: {e}")))?;
    }
    Ok(())
}

fn cmd_profile(a: ProfileArgs) -> CmdResult {
    let data = read_input(&a.input)?;
    let mut opts = ProfileOptions::default();
    if let Some(seed) = a.seed {
        opts.entropy_seed = seed;
    }
    let profile = compute_profile_with(&data, opts)?;
    write_output(None, &to_json(&profile))
}

fn cmd_explain(a: ExplainArgs) -> CmdResult {
    let sorter = build_sorter(&a.tuning)?;
    let data = read_input(&a.input)?;
    write_output(None, &to_json(&sorter.decide(&data)))
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let data = generate(&a.spec())?;
    write_output(a.out.as_ref(), &encode(&data, a.format))
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    let sorter = build_sorter(&a.tuning)?;
    let mut datasets = Vec::new();
    for spec in &a.datasets {
        datasets.push(BenchDataset::from_spec(spec)?);
    }
    for path in &a.inputs {
        let input = InputArgs {
            input: path.clone(),
            format: a.format,
        };
        datasets.push(BenchDataset {
            id: path.display().to_string(),
            spec: None,
            data: read_input(&input)?,
        });
    }
    if datasets.is_empty() {
        for spec in default_suite(a.suite_seed) {
            datasets.push(BenchDataset::from_spec(&spec)?);
        }
    }
    let mut cfg = BenchConfig {
        trials: a.trials as usize,
        sorter,
        sample_rss: a.rss,
        ..BenchConfig::default()
    };
    if let Some(w) = a.tuning.threads {
        cfg.workers = w as usize;
    }
    let rows = run_bench_on(&datasets, &a.algorithms, &cfg)?;
    write_output(a.out.as_ref(), &emit(&rows, a.emit)?)?;
    let invalid: Vec<String> = rows
        .iter()
        .filter(|r| r.status == RowStatus::Invalid)
        .map(|r| format!("{}/{}", r.dataset, r.algorithm))
        .collect();
    if invalid.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "output verification failed: {}",
            invalid.join(", ")
        )))
    }
}

fn cmd_calibrate(a: CalibrateArgs) -> CmdResult {
    let mut cfg = match &a.config {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_slice::<CalibrationConfig>(&bytes)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
        }
        None => CalibrationConfig::default(),
    };
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = a.refine_iters {
        cfg.refine_iters = v;
    }
    if let Some(v) = a.folds {
        cfg.folds = v;
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if a.wall_clock {
        cfg.cost_model = CostModel::WallClock;
    }
    if a.l3_bytes.is_some() {
        cfg.l3_bytes = a.l3_bytes;
    }
    if a.l3_threads.is_some() {
        cfg.threads = a.l3_threads;
    }
    cfg.validate()?;

    let specs = if a.datasets.is_empty() {
        desk_workload(cfg.seed)
    } else {
        a.datasets.clone()
    };
    let workload = specs
        .iter()
        .map(BenchDataset::from_spec)
        .collect::<Result<Vec<_>, _>>()?;
    let result = calibrate(&cfg, &workload)?;
    write_output(a.out.as_ref(), &to_json(&result))
}
