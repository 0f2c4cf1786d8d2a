use super::SortStats;
use crate::error::{Error, Result};
use crate::SortKey;

/// Default upper bound on counting-sort auxiliary words (`k + n`).
pub const DEFAULT_COUNTING_CAP: u64 = 1 << 26;

/// Words counting sort allocates for `n` elements over range `k`.
pub fn counting_aux_words(n: usize, k: u128) -> u128 {
    k + n as u128
}

/// Stable counting sort with the default allocation cap.
pub fn counting_sort(arr: &[SortKey], min_key: SortKey, max_key: SortKey) -> Result<(Vec<SortKey>, SortStats)> {
    counting_sort_capped(arr, min_key, max_key, DEFAULT_COUNTING_CAP)
}

pub fn counting_sort_capped(
    arr: &[SortKey],
    min_key: SortKey,
    max_key: SortKey,
    cap: u64,
) -> Result<(Vec<SortKey>, SortStats)> {
    counting_sort_by_key(arr, |&x| x, min_key, max_key, cap)
}

/// Counting sort of arbitrary items by an integer key in `[min_key, max_key]`.
///
/// Builds inclusive prefix sums over the histogram and places items by a
/// reverse traversal, which keeps equal keys in input order.
pub fn counting_sort_by_key<T: Copy>(
    items: &[T],
    key: impl Fn(&T) -> SortKey,
    min_key: SortKey,
    max_key: SortKey,
    cap: u64,
) -> Result<(Vec<T>, SortStats)> {
    let n = items.len();
    if n == 0 {
        return Ok((Vec::new(), SortStats::default()));
    }
    let k = crate::features::key_range(min_key, max_key)?;
    if counting_aux_words(n, k) > cap as u128 {
        return Err(Error::RangeTooLarge { k, cap });
    }
    let k = k as usize;
    let slot = |item: &T| -> usize {
        let v = key(item);
        debug_assert!((min_key..=max_key).contains(&v));
        (v as i128 - min_key as i128) as usize
    };

    let mut count = vec![0usize; k];
    for item in items {
        count[slot(item)] += 1;
    }
    for i in 1..k {
        count[i] += count[i - 1];
    }
    let mut output = items.to_vec();
    for item in items.iter().rev() {
        let s = slot(item);
        count[s] -= 1;
        output[count[s]] = *item;
    }

    let stats = SortStats {
        ops: (2 * n + k) as u64,
        aux_words: (k + n) as u64,
        ..Default::default()
    };
    Ok((output, stats))
}
