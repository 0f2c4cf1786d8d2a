//! The adaptive sorter: profile, decide, dispatch.

use std::sync::Arc;

use crate::classifier::ModelFile;
use crate::decision::{select_strategy, DecisionSource, DecisionTrace, Strategy, Thresholds};
use crate::error::{Error, Result};
use crate::features::{compute_profile_with, min_max, ArrayProfile, ProfileOptions};
use crate::parallel::{parallel_radix_sort, should_parallelize, ParallelPolicy};
use crate::sorters::{
    counting_sort_capped, insertion_sort, quicksort_with_cutoff, radix_sort, SortStats, DEFAULT_COUNTING_CAP,
};
use crate::SortKey;

#[derive(Debug, Clone)]
pub struct SortOutcome {
    pub sorted: Vec<SortKey>,
    pub trace: DecisionTrace,
    pub stats: SortStats,
}

/// Runtime configuration of the adaptive sorter.
#[derive(Debug, Clone)]
pub struct AdaptiveSorter {
    thresholds: Thresholds,
    model: Option<Arc<ModelFile>>,
    parallel: ParallelPolicy,
    counting_cap: u64,
    entropy_seed: u64,
}

impl Default for AdaptiveSorter {
    fn default() -> Self {
        Self {
            thresholds: Thresholds::default(),
            model: None,
            parallel: ParallelPolicy::default(),
            counting_cap: DEFAULT_COUNTING_CAP,
            entropy_seed: crate::features::DEFAULT_ENTROPY_SEED,
        }
    }
}

impl AdaptiveSorter {
    pub fn new(thresholds: Thresholds) -> Result<Self> {
        thresholds.validate()?;
        Ok(Self {
            thresholds,
            ..Self::default()
        })
    }

    pub fn with_model(mut self, model: Option<Arc<ModelFile>>) -> Self {
        self.model = model;
        self
    }

    pub fn with_parallel(mut self, policy: ParallelPolicy) -> Self {
        self.parallel = policy;
        self
    }

    pub fn with_counting_cap(mut self, cap: u64) -> Self {
        self.counting_cap = cap;
        self
    }

    pub fn with_entropy_seed(mut self, seed: u64) -> Self {
        self.entropy_seed = seed;
        self
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thresholds
    }

    /// Profiles `arr` and picks a strategy without sorting.
    ///
    /// Empty and constant inputs yield a shortcut trace with no strategy.
    pub fn decide(&self, arr: &[SortKey]) -> DecisionTrace {
        let Some((min, max)) = min_max(arr) else {
            return DecisionTrace::shortcut(ArrayProfile::empty(), DecisionSource::EmptyShortcut);
        };
        if min == max {
            return DecisionTrace::shortcut(constant_profile(arr.len(), min), DecisionSource::ConstantShortcut);
        }
        let opts = ProfileOptions {
            skip_entropy: arr.len() <= self.thresholds.n_insertion,
            entropy_seed: self.entropy_seed,
        };
        match compute_profile_with(arr, opts) {
            Ok(profile) => select_strategy(&profile, &self.thresholds, self.model.as_deref()).1,
            Err(e) => {
                // Unrepresentable range: quicksort needs no range.
                let mut profile = ArrayProfile::empty();
                profile.n = arr.len();
                profile.empty = false;
                profile.min_key = Some(min);
                profile.max_key = Some(max);
                DecisionTrace {
                    profile,
                    chosen: Some(Strategy::Quick),
                    path: Vec::new(),
                    classifier_scores: None,
                    source: DecisionSource::Fsm,
                    note: Some(e.to_string()),
                }
            }
        }
    }

    /// Sorts `arr` in place.
    pub fn sort_in_place(&self, arr: &mut [SortKey]) -> (DecisionTrace, SortStats) {
        let mut trace = self.decide(arr);
        let Some(strategy) = trace.chosen else {
            return (trace, SortStats::default());
        };
        let stats = self.dispatch(arr, strategy, &mut trace);
        (trace, stats)
    }

    /// Returns a sorted copy of `arr`.
    pub fn sort(&self, arr: &[SortKey]) -> SortOutcome {
        let mut sorted = arr.to_vec();
        let (trace, stats) = self.sort_in_place(&mut sorted);
        SortOutcome { sorted, trace, stats }
    }

    fn dispatch(&self, arr: &mut [SortKey], strategy: Strategy, trace: &mut DecisionTrace) -> SortStats {
        let profile = &trace.profile;
        match strategy {
            Strategy::Insertion => insertion_sort(arr),
            Strategy::Quick => quicksort_with_cutoff(arr, self.thresholds.n_insertion),
            Strategy::Counting => {
                let (min, max) = (profile.min_key.unwrap(), profile.max_key.unwrap());
                match counting_sort_capped(arr, min, max, self.counting_cap) {
                    Ok((sorted, stats)) => {
                        arr.copy_from_slice(&sorted);
                        stats
                    }
                    Err(e @ Error::RangeTooLarge { .. }) => {
                        let stats = self.run_radix(arr, profile, Strategy::Counting);
                        trace.note = Some(format!("{e}; rerouted to radix"));
                        trace.chosen = Some(Strategy::Radix);
                        stats
                    }
                    Err(e) => unreachable!("counting sort on a profiled range: {e}"),
                }
            }
            Strategy::Radix => self.run_radix(arr, profile, Strategy::Radix),
        }
    }

    fn run_radix(&self, arr: &mut [SortKey], profile: &ArrayProfile, chosen: Strategy) -> SortStats {
        let k = profile.range();
        let (sorted, stats) =
            if chosen == Strategy::Radix && should_parallelize(profile, Strategy::Radix, &self.parallel) {
                parallel_radix_sort(arr, k, self.parallel.workers)
            } else {
                radix_sort(arr, k)
            };
        arr.copy_from_slice(&sorted);
        stats
    }
}

fn constant_profile(n: usize, value: SortKey) -> ArrayProfile {
    ArrayProfile {
        n,
        empty: false,
        min_key: Some(value),
        max_key: Some(value),
        k: Some(1),
        entropy: Some(crate::features::EntropyEstimate {
            entropy: 0.0,
            entropy_exact: true,
            sample_size: n,
        }),
    }
}

/// One-shot adaptive sort with the default parallel policy.
pub fn adaptive_sort(arr: &[SortKey], th: &Thresholds, model: Option<&ModelFile>) -> Result<SortOutcome> {
    let sorter = AdaptiveSorter::new(*th)?.with_model(model.map(|m| Arc::new(m.clone())));
    Ok(sorter.sort(arr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sorters::is_sorted;

    fn sort(arr: &[i64]) -> SortOutcome {
        adaptive_sort(arr, &Thresholds::default(), None).unwrap()
    }

    #[test]
    fn empty_shortcut() {
        let out = sort(&[]);
        assert!(out.sorted.is_empty());
        assert_eq!(out.trace.source, DecisionSource::EmptyShortcut);
        assert!(out.trace.chosen.is_none());
        assert_eq!(out.trace.profile.n, 0);
    }

    #[test]
    fn constant_shortcut() {
        let out = sort(&[7, 7, 7, 7]);
        assert_eq!(out.sorted, [7, 7, 7, 7]);
        assert_eq!(out.trace.source, DecisionSource::ConstantShortcut);
        assert_eq!(out.trace.profile.k, Some(1));
        assert_eq!(out.stats, SortStats::default());
    }

    #[test]
    fn small_input_skips_entropy() {
        let out = sort(&[3, -1, 2]);
        assert_eq!(out.sorted, [-1, 2, 3]);
        assert_eq!(out.trace.chosen, Some(Strategy::Insertion));
        assert!(out.trace.profile.entropy.is_none());
    }

    #[test]
    fn narrow_range_routes_to_counting() {
        let arr: Vec<i64> = (0..10_000).map(|i| (i * 7919) % 500).collect();
        let out = sort(&arr);
        assert_eq!(out.trace.chosen, Some(Strategy::Counting));
        assert!(is_sorted(&out.sorted));
    }

    #[test]
    fn counting_over_cap_reroutes_to_radix() {
        let arr: Vec<i64> = (0..1000).map(|i| (i * 31) % 1000).collect();
        let sorter = AdaptiveSorter::default().with_counting_cap(100);
        let out = sorter.sort(&arr);
        assert_eq!(out.trace.chosen, Some(Strategy::Radix));
        assert!(out.trace.note.as_deref().unwrap().contains("range too large"));
        assert!(is_sorted(&out.sorted));
    }

    #[test]
    fn full_width_keys() {
        let arr = vec![
            i64::MAX,
            i64::MIN,
            0,
            5,
            -5,
            i64::MIN,
            i64::MAX,
            1,
            2,
            3,
            4,
            6,
            7,
            8,
            9,
            10,
            11,
            12,
            13,
            14,
            15,
            16,
            17,
        ];
        let out = sort(&arr);
        let mut expected = arr.clone();
        expected.sort();
        assert_eq!(out.sorted, expected);
    }

    #[test]
    fn invalid_thresholds_rejected() {
        let th = Thresholds {
            entropy_coeff: 0.0,
            ..Default::default()
        };
        assert!(adaptive_sort(&[1, 2], &th, None).is_err());
    }
}
