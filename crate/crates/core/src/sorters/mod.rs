//! The four component sorters.
//!
//! Every sorter reports [`SortStats`]: deterministic operation and memory
//! counters used by the benchmark harness and the calibration objective in
//! place of noisy OS measurements.

mod counting;
mod insertion;
mod quick;
mod radix;

use serde::{Deserialize, Serialize};

pub use counting::{
    counting_aux_words, counting_sort, counting_sort_by_key, counting_sort_capped, DEFAULT_COUNTING_CAP,
};
pub use insertion::{insertion_sort, insertion_sort_by_key};
pub use quick::{median_of_three, quicksort, quicksort_with_cutoff};
pub use radix::{digit_count, radix_base, radix_sort, radix_sort_by_key};
pub(crate) use radix::{signed_radix_by_key, DigitPasses, Digits};

/// Instrumentation counters of one sort call.
///
/// `aux_words` follows a fixed accounting model rather than allocator
/// measurements:
///
/// * insertion: 1 word (the key being inserted)
/// * counting: `k + n` (count array plus output)
/// * radix: `Σ n_bucket · d_bucket + b` (one scatter buffer per digit pass
///   per sign bucket, plus the digit histogram)
/// * quicksort: 2 words per recursion frame at peak depth
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortStats {
    pub comparisons: u64,
    /// Element moves plus histogram and prefix-sum steps.
    pub ops: u64,
    pub aux_words: u64,
    /// Digit passes (radix only).
    pub passes: u32,
    /// Deepest recursion level reached (quicksort only).
    pub max_depth: u32,
    /// Partitioning steps performed (quicksort only).
    pub partitions: u64,
}

impl SortStats {
    /// Abstract cost: comparisons plus data-movement steps.
    pub fn work(&self) -> u64 {
        self.comparisons + self.ops
    }
}

/// `true` when `arr` is in non-decreasing order.
pub fn is_sorted(arr: &[crate::SortKey]) -> bool {
    arr.windows(2).all(|w| w[0] <= w[1])
}
