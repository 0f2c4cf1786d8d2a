//! # ahs-core
//!
//! Adaptive hybrid sorting for `i64` keys. Each input is profiled into its
//! size `n`, key range `k` and value entropy `H`; an ordered rule engine
//! (optionally fronted by a gradient-boosted tree classifier for large
//! inputs) then picks one of four sorters:
//!
//! - insertion sort for tiny inputs,
//! - counting sort for narrow ranges,
//! - LSD radix sort for wide, low-entropy ranges (parallel for big inputs),
//! - quicksort otherwise.
//!
//! ```
//! use ahs_core::{adaptive_sort, Strategy, Thresholds};
//!
//! let data: Vec<i64> = (0..10_000).map(|i| (i * 7919) % 500).collect();
//! let out = adaptive_sort(&data, &Thresholds::default(), None).unwrap();
//! assert!(out.sorted.windows(2).all(|w| w[0] <= w[1]));
//! assert_eq!(out.trace.chosen, Some(Strategy::Counting));
//! ```
//!
//! The crate also ships the dataset generators, the benchmark harness and the
//! threshold calibration used to tune the rule engine.

pub mod adaptive;
pub mod bench;
pub mod calibration;
pub mod classifier;
pub mod datasets;
pub mod decision;
pub mod error;
pub mod features;
pub mod parallel;
pub mod rng;
pub mod sorters;

/// The element type every sorter works on.
pub type SortKey = i64;

pub use adaptive::{adaptive_sort, AdaptiveSorter, SortOutcome};
pub use classifier::{load_model, ModelFile, Prediction};
pub use datasets::{DatasetSpec, Family, FileFormat};
pub use decision::{select_strategy, select_strategy_fsm, DecisionSource, DecisionTrace, Strategy, Thresholds};
pub use error::{Error, Result};
pub use features::{compute_profile, estimate_entropy, ArrayProfile};
pub use parallel::{parallel_radix_sort, should_parallelize, ParallelPolicy};
pub use sorters::SortStats;
