//! Conditionally parallel radix sort.
//!
//! Only radix sort is parallelized, and only for large inputs with a
//! non-trivial range. Each digit pass is a fork-join round: every worker
//! histograms its own contiguous chunk, the histograms are merged
//! sequentially into per-chunk output offsets (digit-major, chunk-minor), and
//! the workers then scatter into disjoint output positions. Chunk order is
//! preserved inside each digit bucket, so the result is the same stable
//! order the sequential sort produces.

use std::num::NonZeroUsize;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::decision::Strategy;
use crate::features::ArrayProfile;
use crate::sorters::{signed_radix_by_key, DigitPasses, Digits, SortStats};
use crate::SortKey;

pub const WORKERS_ENV: &str = "AHS_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelPolicy {
    pub min_n: usize,
    /// Parallelism requires `k > min_k`.
    pub min_k: u128,
    pub workers: usize,
    pub enabled: bool,
}

impl Default for ParallelPolicy {
    fn default() -> Self {
        Self {
            min_n: 1_000_000,
            min_k: 1_000,
            workers: hardware_threads(),
            enabled: true,
        }
    }
}

impl ParallelPolicy {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }

    /// Default policy with the worker count taken from `AHS_WORKERS` when set
    /// to a positive integer.
    pub fn from_env() -> Self {
        let mut policy = Self::default();
        if let Some(w) = std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&w| w >= 1)
        {
            policy.workers = w;
        }
        policy
    }
}

pub fn hardware_threads() -> usize {
    thread::available_parallelism().map_or(1, NonZeroUsize::get)
}

pub fn should_parallelize(profile: &ArrayProfile, strategy: Strategy, policy: &ParallelPolicy) -> bool {
    policy.enabled
        && strategy == Strategy::Radix
        && profile.n >= policy.min_n
        && profile.range() > policy.min_k
        && policy.workers >= 2
}

/// Radix sort with `workers` threads per digit pass. Output is identical to
/// [`crate::sorters::radix_sort`].
pub fn parallel_radix_sort(arr: &[SortKey], k: u128, workers: usize) -> (Vec<SortKey>, SortStats) {
    parallel_radix_sort_by_key(arr, |&x| x, k, workers)
}

pub fn parallel_radix_sort_by_key<T, F>(items: &[T], key: F, k: u128, workers: usize) -> (Vec<T>, SortStats)
where
    T: Copy + Send + Sync,
    F: Fn(&T) -> SortKey + Sync,
{
    assert!(workers >= 1, "need at least one worker");
    signed_radix_by_key(items, key, k, &Parallel { workers })
}

struct Parallel {
    workers: usize,
}

/// Raw output pointer shared by scatter workers that write disjoint indices.
#[derive(Clone, Copy)]
struct ScatterTarget<T>(*mut T);

// SAFETY: workers only write through the pointer at indices assigned to
// them by the offset table; no two workers share an index and the buffer
// outlives the scoped threads.
unsafe impl<T: Send> Send for ScatterTarget<T> {}
unsafe impl<T: Send> Sync for ScatterTarget<T> {}

impl<T> ScatterTarget<T> {
    fn ptr(self) -> *mut T {
        self.0
    }
}

impl DigitPasses for Parallel {
    fn run<T, F>(&self, items: Vec<T>, key: &F, digits: &Digits, passes: u32) -> Vec<T>
    where
        T: Copy + Send + Sync,
        F: Fn(&T) -> u64 + Sync,
    {
        let n = items.len();
        if n <= 1 {
            return items;
        }
        let chunk_len = n.div_ceil(self.workers.clamp(1, n));
        let base = digits.base();
        let mut src = items;
        let mut dst = src.clone();

        for pass in 0..passes as usize {
            let histograms: Vec<Vec<usize>> = thread::scope(|s| {
                let handles: Vec<_> = src
                    .chunks(chunk_len)
                    .map(|chunk| {
                        s.spawn(move || {
                            let mut h = vec![0usize; base];
                            for item in chunk {
                                h[digits.digit(key(item), pass)] += 1;
                            }
                            h
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("radix histogram worker panicked"))
                    .collect()
            });

            let mut offsets = vec![vec![0usize; base]; histograms.len()];
            let mut running = 0;
            for digit in 0..base {
                for (chunk, h) in histograms.iter().enumerate() {
                    offsets[chunk][digit] = running;
                    running += h[digit];
                }
            }
            debug_assert_eq!(running, n);

            let target = ScatterTarget(dst.as_mut_ptr());
            thread::scope(|s| {
                for (chunk, mut offs) in src.chunks(chunk_len).zip(offsets) {
                    s.spawn(move || {
                        let out = target.ptr();
                        for item in chunk {
                            let slot = &mut offs[digits.digit(key(item), pass)];
                            // SAFETY: `*slot < n` and this index belongs to
                            // this chunk alone (see the offset layout above).
                            unsafe { out.add(*slot).write(*item) };
                            *slot += 1;
                        }
                    });
                }
            });
            std::mem::swap(&mut src, &mut dst);
        }
        src
    }
}
