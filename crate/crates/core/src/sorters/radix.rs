use super::SortStats;
use crate::SortKey;

/// Ranges above this use base 256, everything else base 10.
const WIDE_RANGE: u128 = 1_000_000;

pub fn radix_base(k: u128) -> u32 {
    if k > WIDE_RANGE {
        256
    } else {
        10
    }
}

/// `⌈log_base k⌉`, and 1 for `k == 1`.
pub fn digit_count(k: u128, base: u32) -> u32 {
    assert!(base >= 2, "radix base must be at least 2");
    let mut reach: u128 = 1;
    let mut d = 0;
    while reach < k {
        reach = reach.saturating_mul(base as u128);
        d += 1;
    }
    d.max(1)
}

/// Digit extraction for a fixed base.
#[derive(Debug, Clone)]
pub(crate) struct Digits {
    base: u32,
    divisors: Vec<u64>,
}

impl Digits {
    pub(crate) fn new(base: u32, passes: u32) -> Self {
        let divisors = (0..passes)
            .map(|p| (base as u64).checked_pow(p).unwrap_or(u64::MAX))
            .collect();
        Self { base, divisors }
    }

    pub(crate) fn base(&self) -> usize {
        self.base as usize
    }

    #[inline(always)]
    pub(crate) fn digit(&self, x: u64, pass: usize) -> usize {
        if self.base == 256 {
            ((x >> (8 * pass)) & 0xFF) as usize
        } else {
            ((x / self.divisors[pass]) % self.base as u64) as usize
        }
    }
}

/// Runs the LSD digit passes over one sign bucket.
pub(crate) trait DigitPasses {
    fn run<T, F>(&self, items: Vec<T>, key: &F, digits: &Digits, passes: u32) -> Vec<T>
    where
        T: Copy + Send + Sync,
        F: Fn(&T) -> u64 + Sync;
}

pub(crate) struct Sequential;

impl DigitPasses for Sequential {
    fn run<T, F>(&self, items: Vec<T>, key: &F, digits: &Digits, passes: u32) -> Vec<T>
    where
        T: Copy + Send + Sync,
        F: Fn(&T) -> u64 + Sync,
    {
        if items.len() <= 1 {
            return items;
        }
        let base = digits.base();
        let passes = passes as usize;
        // All digit histograms in one sweep.
        let mut counts = vec![0usize; base * passes];
        for item in &items {
            let x = key(item);
            for pass in 0..passes {
                counts[pass * base + digits.digit(x, pass)] += 1;
            }
        }
        let mut src = items;
        let mut dst = src.clone();
        for (pass, offsets) in counts.chunks_mut(base).enumerate() {
            let mut offset = 0;
            for c in offsets.iter_mut() {
                let here = *c;
                *c = offset;
                offset += here;
            }
            for item in &src {
                let slot = &mut offsets[digits.digit(key(item), pass)];
                dst[*slot] = *item;
                *slot += 1;
            }
            std::mem::swap(&mut src, &mut dst);
        }
        src
    }
}

/// Stable signed LSD radix sort.
///
/// The base is 256 when `k > 10^6` and 10 otherwise. Negatives and
/// non-negatives (zero included) are sorted separately on absolute values;
/// the negative bucket is sorted in reverse input order and then reversed,
/// which restores ascending values while keeping equal keys in input order.
pub fn radix_sort(arr: &[SortKey], k: u128) -> (Vec<SortKey>, SortStats) {
    radix_sort_by_key(arr, |&x| x, k)
}

pub fn radix_sort_by_key<T, F>(items: &[T], key: F, k: u128) -> (Vec<T>, SortStats)
where
    T: Copy + Send + Sync,
    F: Fn(&T) -> SortKey + Sync,
{
    signed_radix_by_key(items, key, k, &Sequential)
}

pub(crate) fn signed_radix_by_key<T, F, P>(items: &[T], key: F, k: u128, passes_impl: &P) -> (Vec<T>, SortStats)
where
    T: Copy + Send + Sync,
    F: Fn(&T) -> SortKey + Sync,
    P: DigitPasses,
{
    let base = radix_base(k);
    let mut negatives: Vec<T> = Vec::new();
    let mut non_negatives: Vec<T> = Vec::with_capacity(items.len());
    for item in items {
        if key(item) < 0 {
            negatives.push(*item);
        } else {
            non_negatives.push(*item);
        }
    }
    negatives.reverse();

    let magnitude = |item: &T| key(item).unsigned_abs();
    let bucket_passes = |bucket: &[T]| -> u32 {
        let max = bucket.iter().map(magnitude).max().unwrap_or(0);
        digit_count(max as u128 + 1, base)
    };

    let neg_passes = if negatives.is_empty() {
        0
    } else {
        bucket_passes(&negatives)
    };
    let pos_passes = if non_negatives.is_empty() {
        0
    } else {
        bucket_passes(&non_negatives)
    };

    let (n_neg, n_pos) = (negatives.len() as u64, non_negatives.len() as u64);
    let mut sorted_neg = if neg_passes > 0 {
        passes_impl.run(negatives, &magnitude, &Digits::new(base, neg_passes), neg_passes)
    } else {
        negatives
    };
    sorted_neg.reverse();
    let sorted_pos = if pos_passes > 0 {
        passes_impl.run(non_negatives, &magnitude, &Digits::new(base, pos_passes), pos_passes)
    } else {
        non_negatives
    };

    let mut out = sorted_neg;
    out.extend_from_slice(&sorted_pos);

    let total_passes = (neg_passes + pos_passes) as u64;
    let stats = SortStats {
        comparisons: 0,
        ops: items.len() as u64
            + 2 * (n_neg * neg_passes as u64 + n_pos * pos_passes as u64)
            + total_passes * base as u64,
        aux_words: n_neg * neg_passes as u64 + n_pos * pos_passes as u64 + base as u64,
        passes: neg_passes.max(pos_passes),
        ..Default::default()
    };
    (out, stats)
}
