use super::{insertion_sort, SortStats};
use crate::SortKey;

/// Extra recursion levels allowed on top of `2·log2(n)` before the heapsort
/// fallback kicks in.
const DEPTH_SLACK: u32 = 64;

pub fn median_of_three(a: SortKey, b: SortKey, c: SortKey) -> SortKey {
    a.max(b).min(a.min(b).max(c))
}

/// Quicksort with median-of-three pivots and three-way partitioning, no
/// insertion cutoff.
pub fn quicksort(arr: &mut [SortKey]) -> SortStats {
    quicksort_with_cutoff(arr, 0)
}

/// Quicksort that hands subarrays of at most `cutoff` elements to insertion
/// sort.
///
/// Recursion goes into the smaller partition and loops on the larger one.
/// Past `2·log2(n) + 64` levels the remaining subarray is heapsorted, which
/// bounds the worst case at `O(n log n)`.
pub fn quicksort_with_cutoff(arr: &mut [SortKey], cutoff: usize) -> SortStats {
    let mut stats = SortStats::default();
    if arr.len() > 1 {
        let budget = 2 * arr.len().ilog2() + DEPTH_SLACK;
        sort_range(arr, cutoff, 1, budget, &mut stats);
    }
    stats.aux_words = 2 * stats.max_depth as u64;
    stats
}

fn sort_range(mut arr: &mut [SortKey], cutoff: usize, depth: u32, budget: u32, stats: &mut SortStats) {
    let mut depth = depth;
    loop {
        if arr.len() <= 1 {
            return;
        }
        stats.max_depth = stats.max_depth.max(depth);
        if arr.len() <= cutoff {
            let s = insertion_sort(arr);
            stats.comparisons += s.comparisons;
            stats.ops += s.ops;
            return;
        }
        if depth > budget {
            heapsort(arr, stats);
            return;
        }

        let (lt, gt) = partition3(arr, stats);
        let (left, rest) = arr.split_at_mut(lt);
        let right = &mut rest[gt - lt..];
        if left.len() < right.len() {
            sort_range(left, cutoff, depth + 1, budget, stats);
            arr = right;
        } else {
            sort_range(right, cutoff, depth + 1, budget, stats);
            arr = left;
        }
        depth += 1;
    }
}

/// Three-way partition (Bentley-McIlroy) around the median of first,
/// middle and last. Keys equal to the pivot are parked at both ends during
/// the scan and swapped into the middle afterwards, so already sorted input
/// stays sorted. Returns `(lt, gt)` with `arr[..lt] < pivot`,
/// `arr[lt..gt] == pivot`, `arr[gt..] > pivot`.
fn partition3(arr: &mut [SortKey], stats: &mut SortStats) -> (usize, usize) {
    let n = arr.len();
    let pivot = median_of_three(arr[0], arr[n / 2], arr[n - 1]);
    stats.comparisons += 3;
    stats.partitions += 1;

    let mut cmp = 0u64;
    let mut swaps = 0u64;
    // [0, a) == p, [a, b) < p, (c, d] > p, (d, n) == p; c and d are offset
    // by one so they stay unsigned.
    let (mut a, mut b) = (0usize, 0usize);
    let (mut c, mut d) = (n, n);
    loop {
        while b < c {
            cmp += 1;
            if arr[b] > pivot {
                break;
            }
            cmp += 1;
            if arr[b] == pivot {
                arr.swap(a, b);
                swaps += 1;
                a += 1;
            }
            b += 1;
        }
        while b < c {
            cmp += 1;
            if arr[c - 1] < pivot {
                break;
            }
            cmp += 1;
            if arr[c - 1] == pivot {
                arr.swap(c - 1, d - 1);
                swaps += 1;
                d -= 1;
            }
            c -= 1;
        }
        if b >= c {
            break;
        }
        arr.swap(b, c - 1);
        swaps += 1;
        b += 1;
        c -= 1;
    }

    let s = a.min(b - a);
    for i in 0..s {
        arr.swap(i, b - s + i);
    }
    let s = (d - c).min(n - d);
    for i in 0..s {
        arr.swap(b + i, n - s + i);
    }
    stats.comparisons += cmp;
    // A swap moves two elements.
    stats.ops += 2 * (swaps + (a.min(b - a) + (d - c).min(n - d)) as u64);
    (b - a, n - (d - c))
}

fn heapsort(arr: &mut [SortKey], stats: &mut SortStats) {
    fn sift_down(arr: &mut [SortKey], mut root: usize, end: usize, stats: &mut SortStats) {
        loop {
            let mut child = 2 * root + 1;
            if child >= end {
                return;
            }
            if child + 1 < end {
                stats.comparisons += 1;
                if arr[child] < arr[child + 1] {
                    child += 1;
                }
            }
            stats.comparisons += 1;
            if arr[root] >= arr[child] {
                return;
            }
            arr.swap(root, child);
            stats.ops += 2;
            root = child;
        }
    }
    let n = arr.len();
    for start in (0..n / 2).rev() {
        sift_down(arr, start, n, stats);
    }
    for end in (1..n).rev() {
        arr.swap(0, end);
        stats.ops += 2;
        sift_down(arr, 0, end, stats);
    }
}
