//! Input profiling: the `(n, k, H)` state vector that drives strategy
//! selection.
//!
//! `k` is the key range `max - min + 1`, computed in 128-bit arithmetic so
//! that extreme `i64` inputs cannot overflow. `H` is the Shannon entropy of
//! the empirical value distribution in bits. Ranges up to [`HIST_MAX`] get an
//! exact dense histogram; wider ranges fall back to hash-map counts over a
//! seeded uniform sample.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::SortKey;

/// Largest key range profiled with an exact dense histogram.
pub const HIST_MAX: u128 = 1 << 20;

/// Maximum number of elements drawn by the sampled entropy estimator.
pub const SAMPLE_CAP: usize = 100_000;

/// Default seed of the sampled entropy estimator.
pub const DEFAULT_ENTROPY_SEED: u64 = 0xA45;

/// Slack allowed above `log2(k)` for floating-point rounding.
pub const ENTROPY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// Shannon entropy in bits.
    pub entropy: f64,
    /// `true` when every element went through a dense histogram.
    pub entropy_exact: bool,
    /// Number of elements the estimate is based on.
    pub sample_size: usize,
}

/// The state vector of an input array.
///
/// An empty input has `n == 0`, `empty == true` and no range or entropy.
/// `entropy` is also absent when profiling was asked to skip it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayProfile {
    pub n: usize,
    pub empty: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_key: Option<SortKey>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_key: Option<SortKey>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u128>,
    #[serde(default, flatten, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<EntropyEstimate>,
}

impl ArrayProfile {
    pub fn empty() -> Self {
        Self {
            n: 0,
            empty: true,
            min_key: None,
            max_key: None,
            k: None,
            entropy: None,
        }
    }

    /// Builds a profile from bare features, as if measured exactly.
    ///
    /// Useful for driving the decision engine without an array; `min_key`
    /// is 0 and `max_key` is clamped into `i64`.
    pub fn from_features(n: usize, k: u128, entropy: f64) -> Self {
        let max = (k.saturating_sub(1)).min(i64::MAX as u128) as i64;
        Self {
            n,
            empty: n == 0,
            min_key: Some(0),
            max_key: Some(max),
            k: Some(k),
            entropy: Some(EntropyEstimate {
                entropy,
                entropy_exact: true,
                sample_size: n,
            }),
        }
    }

    /// Key range, or 0 for an empty profile.
    pub fn range(&self) -> u128 {
        self.k.unwrap_or(0)
    }

    pub fn entropy_bits(&self) -> Option<f64> {
        self.entropy.map(|e| e.entropy)
    }

    pub fn entropy_exact(&self) -> bool {
        self.entropy.is_some_and(|e| e.entropy_exact)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileOptions {
    /// Skip entropy estimation entirely (the value would go unused).
    pub skip_entropy: bool,
    pub entropy_seed: u64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            skip_entropy: false,
            entropy_seed: DEFAULT_ENTROPY_SEED,
        }
    }
}

/// Computes the full `(n, k, H)` profile of `arr`.
pub fn compute_profile(arr: &[SortKey]) -> Result<ArrayProfile> {
    compute_profile_with(arr, ProfileOptions::default())
}

pub fn compute_profile_with(arr: &[SortKey], opts: ProfileOptions) -> Result<ArrayProfile> {
    let Some((min, max)) = min_max(arr) else {
        return Ok(ArrayProfile::empty());
    };
    let k = key_range(min, max)?;
    let entropy = if opts.skip_entropy {
        None
    } else {
        Some(estimate_entropy_seeded(arr, min, k, opts.entropy_seed))
    };
    Ok(ArrayProfile {
        n: arr.len(),
        empty: false,
        min_key: Some(min),
        max_key: Some(max),
        k: Some(k),
        entropy,
    })
}

/// Single pass minimum and maximum; `None` for an empty slice.
pub fn min_max(arr: &[SortKey]) -> Option<(SortKey, SortKey)> {
    let (&first, rest) = arr.split_first()?;
    let mut lo = first;
    let mut hi = first;
    for &x in rest {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    Some((lo, hi))
}

/// `max - min + 1` in 128-bit arithmetic.
pub fn key_range(min: SortKey, max: SortKey) -> Result<u128> {
    (max as i128)
        .checked_sub(min as i128)
        .and_then(|d| d.checked_add(1))
        .filter(|&k| k >= 1)
        .map(|k| k as u128)
        .ok_or(Error::RangeOverflow { min, max })
}

/// Entropy estimate with the default sampling seed.
pub fn estimate_entropy(arr: &[SortKey], min_key: SortKey, k: u128) -> EntropyEstimate {
    estimate_entropy_seeded(arr, min_key, k, DEFAULT_ENTROPY_SEED)
}

/// Shannon entropy of the value distribution of `arr`.
///
/// `min_key` and `k` must describe `arr` (as produced by [`compute_profile`]).
/// Probabilities are taken over observed values only, and the result is
/// clamped to `[0, log2 k]`.
pub fn estimate_entropy_seeded(arr: &[SortKey], min_key: SortKey, k: u128, seed: u64) -> EntropyEstimate {
    debug_assert!(!arr.is_empty() && k >= 1);
    let (raw, exact, sample_size) = if k <= HIST_MAX {
        let mut hist = vec![0u64; k as usize];
        for &x in arr {
            hist[(x as i128 - min_key as i128) as usize] += 1;
        }
        (entropy_from_counts(&hist, arr.len() as u64), true, arr.len())
    } else {
        let sample_size = arr.len().min(SAMPLE_CAP);
        let mut sample: Vec<SortKey> = if sample_size == arr.len() {
            arr.to_vec()
        } else {
            let mut rng = SplitMix64::new(seed);
            (0..sample_size)
                .map(|_| arr[rng.below(arr.len() as u64) as usize])
                .collect()
        };
        // Counting runs of a sorted sample keeps the summation order fixed.
        sample.sort_unstable();
        let counts: Vec<u64> = sample.chunk_by(|a, b| a == b).map(|run| run.len() as u64).collect();
        let h = entropy_from_counts(&counts, sample_size as u64);
        (h, false, sample_size)
    };
    let upper = (k as f64).log2();
    EntropyEstimate {
        entropy: raw.clamp(0.0, upper),
        entropy_exact: exact,
        sample_size,
    }
}

fn entropy_from_counts<'a>(counts: impl IntoIterator<Item = &'a u64>, total: u64) -> f64 {
    let total = total as f64;
    let h: f64 = counts
        .into_iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    // -0.0 for a single symbol
    h.max(0.0)
}
