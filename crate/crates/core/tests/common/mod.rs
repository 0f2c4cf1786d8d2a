#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use ahs_core::{load_model, ModelFile};

pub fn fixture_model() -> ModelFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/fsm_fixture_model.json");
    load_model(&std::fs::read(path).expect("fixture present")).expect("fixture loads")
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 10f64.powf(lo.log10() + (hi.log10() - lo.log10()) * i as f64 / (count - 1) as f64))
        .collect()
}

/// 8 x 8 x 8 grid of `(n, k, H)`: n and k log-spaced, H a fraction of log2 k.
pub fn feature_grid() -> Vec<(usize, u128, f64)> {
    let mut out = Vec::with_capacity(512);
    for n in log_spaced(1e3, 1e6, 8) {
        for k in log_spaced(10.0, 1e7, 8) {
            let k = k.round() as u128;
            for j in 0..8 {
                let frac = 0.1 + 0.8 * j as f64 / 7.0;
                out.push((n.round() as usize, k, frac * (k as f64).log2()));
            }
        }
    }
    out
}

/// Stable-sort oracle: items bucketed by key in input order, buckets
/// concatenated in ascending key order.
pub fn stable_oracle<T: Copy>(items: &[T], key: impl Fn(&T) -> i64) -> Vec<T> {
    let mut buckets: BTreeMap<i64, Vec<T>> = BTreeMap::new();
    for it in items {
        buckets.entry(key(it)).or_default().push(*it);
    }
    buckets.into_values().flatten().collect()
}

/// Brute-force Shannon entropy in bits.
pub fn entropy_oracle(data: &[i64]) -> f64 {
    let mut sorted = data.to_vec();
    sorted.sort_unstable();
    let n = data.len() as f64;
    let mut h = 0.0;
    for run in sorted.chunk_by(|a, b| a == b) {
        let p = run.len() as f64 / n;
        h -= p * p.log2();
    }
    h
}
