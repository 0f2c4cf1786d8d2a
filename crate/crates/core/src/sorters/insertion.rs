use super::SortStats;
use crate::SortKey;

/// Straight insertion sort, in place and stable.
///
/// `comparisons` counts every key comparison, including the one that stops
/// each inner scan.
pub fn insertion_sort(arr: &mut [SortKey]) -> SortStats {
    insertion_sort_by_key(arr, |&x| x)
}

pub fn insertion_sort_by_key<T: Copy, K: Ord>(arr: &mut [T], key: impl Fn(&T) -> K) -> SortStats {
    let mut comparisons = 0u64;
    let mut ops = 0u64;
    for i in 1..arr.len() {
        let item = arr[i];
        let item_key = key(&item);
        let mut j = i;
        while j > 0 {
            comparisons += 1;
            if key(&arr[j - 1]) > item_key {
                arr[j] = arr[j - 1];
                ops += 1;
                j -= 1;
            } else {
                break;
            }
        }
        arr[j] = item;
        ops += 1;
    }
    SortStats {
        comparisons,
        ops,
        aux_words: 1,
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn basic() {
        let mut empty: [i64; 0] = [];
        insertion_sort(&mut empty);
        let mut a = [3, 1, 2];
        insertion_sort(&mut a);
        assert_eq!(a, [1, 2, 3]);
    }

    #[test]
    fn stable_on_pairs() {
        let mut a = [(2, 'a'), (1, 'b'), (2, 'c'), (1, 'd')];
        insertion_sort_by_key(&mut a, |p| p.0);
        assert_eq!(a, [(1, 'b'), (1, 'd'), (2, 'a'), (2, 'c')]);
    }

    fn permutations(n: usize) -> Vec<Vec<i64>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, (n - 1) as i64);
                out.push(q);
            }
        }
        out
    }

    fn harmonic(n: usize) -> f64 {
        (1..=n).map(|i| 1.0 / i as f64).sum()
    }

    /// Closed-form mean comparisons of straight insertion over distinct keys:
    /// inversions + (n - 1) minus the scans that run off the front.
    fn expected_comparisons(n: usize) -> f64 {
        let n_f = n as f64;
        n_f * (n_f - 1.0) / 4.0 + (n_f - 1.0) - (harmonic(n) - 1.0)
    }

    #[test]
    fn mean_comparisons_match_enumeration() {
        for n in 1..=7 {
            let perms = permutations(n);
            let total: u64 = perms.iter().map(|p| insertion_sort(&mut p.clone()).comparisons).sum();
            let mean = total as f64 / perms.len() as f64;
            assert!(
                (mean - expected_comparisons(n)).abs() < 1e-9,
                "n={n}: {mean} vs {}",
                expected_comparisons(n)
            );
        }
    }

    #[test]
    fn mean_comparisons_n16_sampled() {
        let mut rng = SplitMix64::new(3);
        let n = 16;
        let trials = 20_000;
        let mut total = 0u64;
        for _ in 0..trials {
            let mut a: Vec<i64> = (0..n).collect();
            for i in (1..a.len()).rev() {
                a.swap(i, rng.below(i as u64 + 1) as usize);
            }
            total += insertion_sort(&mut a).comparisons;
        }
        let mean = total as f64 / trials as f64;
        let expected = expected_comparisons(n as usize);
        assert!((mean / expected - 1.0).abs() < 0.01, "{mean} vs {expected}");
    }

    #[test]
    fn nearly_sorted_is_linear() {
        let n = 16;
        let mut a: Vec<i64> = (0..n).collect();
        a.swap(7, 8);
        let stats = insertion_sort(&mut a);
        assert!(stats.comparisons <= 2 * n as u64);
        assert_eq!(stats.comparisons, n as u64);
    }
}
