//! Inputs shared by the criterion benchmarks.

use ahs_core::datasets::generate;
use ahs_core::{DatasetSpec, Family};

/// Named datasets covering each routing regime.
pub fn routing_inputs(n: usize) -> Vec<(&'static str, Vec<i64>)> {
    let gen = |family, k| generate(&DatasetSpec::new(family, n, k, 7)).expect("valid spec");
    vec![
        ("narrow_k500", gen(Family::Uniform, 500)),
        ("wide_k1e9", gen(Family::Uniform, 1_000_000_000)),
        ("mid_k1e5", gen(Family::Uniform, 100_000)),
        ("gaussian_k1e6", gen(Family::Gaussian, 1_000_000)),
        ("zipf_k1e3", gen(Family::Zipf, 1000)),
        ("presorted", gen(Family::PresortedAsc, 0)),
        ("sawtooth", gen(Family::Sawtooth, 0)),
    ]
}

/// `count` arrays of 1 to 20 random keys.
pub fn small_batch(count: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut rng = ahs_core::rng::SplitMix64::new(seed);
    (0..count)
        .map(|_| {
            let n = 1 + rng.below(20) as usize;
            (0..n).map(|_| rng.below(1_000_000) as i64).collect()
        })
        .collect()
}
