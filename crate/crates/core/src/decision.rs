//! Strategy selection.
//!
//! The rule engine is an ordered list of threshold tests; the first rule that
//! fires picks the sorter:
//!
//! 1. `n <= n_insertion` → insertion
//! 2. `k <= k_counting` → counting
//! 3. `k > k_radix` and `H < entropy_coeff · log2(k)` → radix
//! 4. otherwise → quicksort
//!
//! The entropy test is a ratio against `log2(k)`, not a bare bit count: a
//! bare `H < 0.7` would almost never fire on wide ranges.
//!
//! When the entropy came from a sample rather than an exact histogram, rule 3
//! also requires radix to be the smaller allocation, `d < 1 + k/n` with `d`
//! the digit count in the radix base.
//!
//! [`select_strategy`] puts a trained classifier in front of the rules for
//! inputs with at least `ml_min_n` elements.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifier::ModelFile;
use crate::error::{Error, Result};
use crate::features::ArrayProfile;
use crate::sorters::{digit_count, radix_base};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Insertion,
    Counting,
    Radix,
    Quick,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Insertion,
        Strategy::Counting,
        Strategy::Radix,
        Strategy::Quick,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Insertion => "insertion",
            Strategy::Counting => "counting",
            Strategy::Radix => "radix",
            Strategy::Quick => "quick",
        }
    }

    /// Position in [`Strategy::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| format!("unknown strategy {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub n_insertion: usize,
    pub k_counting: u128,
    pub k_radix: u128,
    pub entropy_coeff: f64,
    pub ml_min_n: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            n_insertion: 20,
            k_counting: 1024,
            k_radix: 1_000_000,
            entropy_coeff: 0.7,
            ml_min_n: 1000,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidThresholds(msg));
        if self.n_insertion == 0 || self.k_counting == 0 || self.k_radix == 0 || self.ml_min_n == 0 {
            return bad("all thresholds must be positive".into());
        }
        if self.k_counting >= self.k_radix {
            return bad(format!(
                "k_counting ({}) must be below k_radix ({})",
                self.k_counting, self.k_radix
            ));
        }
        if !(self.entropy_coeff > 0.0 && self.entropy_coeff <= 1.0) {
            return bad(format!("entropy_coeff {} not in (0, 1]", self.entropy_coeff));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `n <= n_insertion`
    SmallInput,
    /// `k <= k_counting`
    NarrowRange,
    /// `k > k_radix`
    WideRange,
    /// `H < entropy_coeff · log2(k)`
    LowEntropy,
    /// `d < 1 + k/n`, only checked for sampled entropy
    RadixSpace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleEval {
    pub rule: Rule,
    pub value: f64,
    pub threshold: f64,
    pub outcome: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionSource {
    Fsm,
    Classifier,
    /// Empty input, returned without profiling.
    EmptyShortcut,
    /// All keys equal, returned without sorting.
    ConstantShortcut,
}

/// Per-class classifier scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub insertion: f64,
    pub counting: f64,
    pub radix: f64,
    pub quick: f64,
}

impl From<[f64; 4]> for ClassScores {
    fn from(s: [f64; 4]) -> Self {
        Self {
            insertion: s[0],
            counting: s[1],
            radix: s[2],
            quick: s[3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTrace {
    pub profile: ArrayProfile,
    /// `None` only for the shortcut paths, which run no sorter.
    pub chosen: Option<Strategy>,
    pub path: Vec<RuleEval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classifier_scores: Option<ClassScores>,
    pub source: DecisionSource,
    /// Why the classifier was consulted but not used, or why profiling failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl DecisionTrace {
    pub fn shortcut(profile: ArrayProfile, source: DecisionSource) -> Self {
        Self {
            profile,
            chosen: None,
            path: Vec::new(),
            classifier_scores: None,
            source,
            note: None,
        }
    }
}

/// Applies the ordered threshold rules. `profile.n` must be at least 1.
pub fn select_strategy_fsm(profile: &ArrayProfile, th: &Thresholds) -> (Strategy, DecisionTrace) {
    debug_assert!(profile.n >= 1, "empty inputs never reach the decision engine");
    let mut path = Vec::with_capacity(4);
    let chosen = run_rules(profile, th, &mut path);
    let trace = DecisionTrace {
        profile: profile.clone(),
        chosen: Some(chosen),
        path,
        classifier_scores: None,
        source: DecisionSource::Fsm,
        note: None,
    };
    (chosen, trace)
}

fn run_rules(profile: &ArrayProfile, th: &Thresholds, path: &mut Vec<RuleEval>) -> Strategy {
    let mut eval = |rule, value: f64, threshold: f64, outcome: bool| {
        path.push(RuleEval {
            rule,
            value,
            threshold,
            outcome,
        });
        outcome
    };

    let n = profile.n;
    if eval(Rule::SmallInput, n as f64, th.n_insertion as f64, n <= th.n_insertion) {
        return Strategy::Insertion;
    }

    let k = profile.range();
    if eval(Rule::NarrowRange, k as f64, th.k_counting as f64, k <= th.k_counting) {
        return Strategy::Counting;
    }

    if !eval(Rule::WideRange, k as f64, th.k_radix as f64, k > th.k_radix) {
        return Strategy::Quick;
    }

    let limit = th.entropy_coeff * (k as f64).log2();
    // A profile without entropy cannot satisfy the entropy rule.
    let h = profile.entropy_bits().unwrap_or(f64::INFINITY);
    if !eval(Rule::LowEntropy, h, limit, h < limit) {
        return Strategy::Quick;
    }

    if profile.entropy.is_some() && !profile.entropy_exact() {
        let d = digit_count(k, radix_base(k)) as f64;
        let bound = 1.0 + k as f64 / n as f64;
        if !eval(Rule::RadixSpace, d, bound, d < bound) {
            return Strategy::Quick;
        }
    }
    Strategy::Radix
}

/// Hybrid policy: the classifier decides for `n >= ml_min_n` when a model is
/// loaded, the rule engine decides everything else.
///
/// A classifier that yields non-finite scores is ignored and the rules decide;
/// the trace records the fallback.
pub fn select_strategy(
    profile: &ArrayProfile,
    th: &Thresholds,
    model: Option<&ModelFile>,
) -> (Strategy, DecisionTrace) {
    let Some(model) = model.filter(|_| profile.n >= th.ml_min_n) else {
        return select_strategy_fsm(profile, th);
    };
    let n = profile.n as f64;
    let k = profile.range() as f64;
    let h = profile.entropy_bits().unwrap_or(0.0);
    let prediction = model.predict(n, k, h);
    if prediction.scores.iter().all(|s| s.is_finite()) {
        let trace = DecisionTrace {
            profile: profile.clone(),
            chosen: Some(prediction.strategy),
            path: vec![RuleEval {
                rule: Rule::SmallInput,
                value: n,
                threshold: th.ml_min_n as f64,
                outcome: false,
            }],
            classifier_scores: Some(prediction.scores.into()),
            source: DecisionSource::Classifier,
            note: None,
        };
        return (prediction.strategy, trace);
    }
    let (strategy, mut trace) = select_strategy_fsm(profile, th);
    trace.classifier_scores = Some(prediction.scores.into());
    trace.note = Some("classifier produced non-finite scores; fell back to rules".into());
    (strategy, trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fsm(n: usize, k: u128, h: f64) -> Strategy {
        select_strategy_fsm(&ArrayProfile::from_features(n, k, h), &Thresholds::default()).0
    }

    #[test]
    fn canonical_routes() {
        assert_eq!(fsm(10, 1_000_000_000, 20.0), Strategy::Insertion);
        assert_eq!(fsm(10_000, 500, 5.0), Strategy::Counting);
        assert_eq!(fsm(10_000, 10_000_000, 3.0), Strategy::Radix);
        assert_eq!(fsm(10_000, 100_000, 10.0), Strategy::Quick);
    }

    #[test]
    fn boundaries_are_inclusive_where_stated() {
        assert_eq!(fsm(20, 5000, 1.0), Strategy::Insertion);
        assert_eq!(fsm(21, 1024, 1.0), Strategy::Counting);
        assert_eq!(fsm(21, 1025, 1.0), Strategy::Quick);
        assert_eq!(fsm(10_000, 1_000_000, 1.0), Strategy::Quick);
        assert_eq!(fsm(10_000, 1_000_001, 1.0), Strategy::Radix);
    }

    #[test]
    fn high_entropy_wide_range_is_quick() {
        // 0.7 · log2(1e7) ≈ 16.28
        assert_eq!(fsm(10_000, 10_000_000, 16.2), Strategy::Radix);
        assert_eq!(fsm(10_000, 10_000_000, 16.3), Strategy::Quick);
    }

    #[test]
    fn sampled_entropy_applies_space_guard() {
        let mut p = ArrayProfile::from_features(10_000_000, 2_000_000, 3.0);
        p.entropy.as_mut().unwrap().entropy_exact = false;
        // d = 3, 1 + k/n = 1.2
        let (s, trace) = select_strategy_fsm(&p, &Thresholds::default());
        assert_eq!(s, Strategy::Quick);
        assert_eq!(trace.path.last().unwrap().rule, Rule::RadixSpace);

        let mut p = ArrayProfile::from_features(10_000, 10_000_000, 3.0);
        p.entropy.as_mut().unwrap().entropy_exact = false;
        assert_eq!(select_strategy_fsm(&p, &Thresholds::default()).0, Strategy::Radix);
    }

    #[test]
    fn trace_records_path_in_order() {
        let (_, trace) = select_strategy_fsm(
            &ArrayProfile::from_features(10_000, 100_000, 10.0),
            &Thresholds::default(),
        );
        let rules: Vec<Rule> = trace.path.iter().map(|e| e.rule).collect();
        assert_eq!(rules, [Rule::SmallInput, Rule::NarrowRange, Rule::WideRange]);
        assert_eq!(trace.source, DecisionSource::Fsm);
    }

    #[test]
    fn no_model_uses_rules() {
        let p = ArrayProfile::from_features(1_000_000, 500, 1.1);
        let (s, trace) = select_strategy(&p, &Thresholds::default(), None);
        assert_eq!(s, Strategy::Counting);
        assert_eq!(trace.source, DecisionSource::Fsm);
    }

    #[test]
    fn threshold_validation() {
        assert!(Thresholds::default().validate().is_ok());
        let bad = Thresholds {
            k_counting: 2_000_000,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = Thresholds {
            entropy_coeff: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = Thresholds {
            n_insertion: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn strategy_names() {
        assert_eq!(serde_json::to_string(&Strategy::Quick).unwrap(), "\"quick\"");
        for s in Strategy::ALL {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
        }
    }
}
