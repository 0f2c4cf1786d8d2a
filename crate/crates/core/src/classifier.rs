//! Tree-ensemble inference.
//!
//! Models are UTF-8 JSON:
//!
//! ```json
//! {
//!   "version": "ahs-model/1",
//!   "classes": ["insertion", "counting", "radix", "quick"],
//!   "feature_names": ["n", "k", "H"],
//!   "base_scores": [0.0, 0.0, 0.0, 0.0],
//!   "trees": [
//!     {"nodes": [
//!       {"feature": 1, "threshold": 1024.5, "left": 1, "right": 2},
//!       {"leaf": [0.0, 1.0, 0.0, 0.0]},
//!       {"leaf": [0.0, 0.0, 0.0, 1.0]}
//!     ]}
//!   ]
//! }
//! ```
//!
//! Leaf vectors and base scores are ordered like `classes`. Traversal goes
//! left iff `feature value < threshold`. A class score is its base score plus
//! the sum of the reached leaves; the prediction is the argmax, ties going to
//! the class listed first. Features are raw `n`, `k` and `H`.
//!
//! Everything is validated at load time so that [`ModelFile::predict`] cannot
//! fail.

use serde::{Deserialize, Serialize};

use crate::decision::Strategy;
use crate::error::{Error, Result};

pub const MODEL_VERSION: &str = "ahs-model/1";
pub const FEATURE_NAMES: [&str; 3] = ["n", "k", "H"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Node {
    Leaf {
        leaf: Vec<f64>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

/// On-disk representation, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub version: String,
    pub classes: Vec<Strategy>,
    pub feature_names: Vec<String>,
    pub base_scores: Vec<f64>,
    pub trees: Vec<Tree>,
}

/// A validated tree ensemble. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    raw: RawModel,
    /// `slot_of[strategy.index()]` is that strategy's position in `classes`.
    slot_of: [usize; 4],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub strategy: Strategy,
    /// Scores in canonical [`Strategy::ALL`] order, independent of the
    /// model's class order.
    pub scores: [f64; 4],
}

/// Parses and validates a model.
pub fn load_model(bytes: &[u8]) -> Result<ModelFile> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(Error::ModelParse("empty model file".into()));
    }
    let text = std::str::from_utf8(bytes).map_err(|e| Error::ModelParse(e.to_string()))?;
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::ModelParse(e.to_string()))?;
    if let Some(version) = value.get("version").and_then(|v| v.as_str()) {
        if version != MODEL_VERSION {
            return Err(Error::UnsupportedModelVersion {
                found: version.to_owned(),
                expected: MODEL_VERSION.to_owned(),
            });
        }
    }
    let raw: RawModel = serde_json::from_value(value).map_err(|e| Error::ModelParse(e.to_string()))?;
    ModelFile::new(raw)
}

impl ModelFile {
    pub fn new(raw: RawModel) -> Result<Self> {
        let invalid = |msg: String| Err(Error::ModelValidation(msg));
        if raw.version != MODEL_VERSION {
            return Err(Error::UnsupportedModelVersion {
                found: raw.version,
                expected: MODEL_VERSION.to_owned(),
            });
        }
        if raw.feature_names != FEATURE_NAMES {
            return invalid(format!(
                "feature_names must be {FEATURE_NAMES:?}, got {:?}",
                raw.feature_names
            ));
        }
        if raw.classes.len() != 4 {
            return invalid(format!("expected 4 classes, got {}", raw.classes.len()));
        }
        let mut slot_of = [usize::MAX; 4];
        for (slot, class) in raw.classes.iter().enumerate() {
            if slot_of[class.index()] != usize::MAX {
                return invalid(format!("class {class} listed twice"));
            }
            slot_of[class.index()] = slot;
        }
        if raw.base_scores.len() != 4 || raw.base_scores.iter().any(|s| !s.is_finite()) {
            return invalid("base_scores must be 4 finite numbers".into());
        }
        for (t, tree) in raw.trees.iter().enumerate() {
            validate_tree(tree).map_err(|msg| Error::ModelValidation(format!("tree {t}: {msg}")))?;
        }
        Ok(Self { raw, slot_of })
    }

    pub fn raw(&self) -> &RawModel {
        &self.raw
    }

    pub fn classes(&self) -> &[Strategy] {
        &self.raw.classes
    }

    pub fn trees(&self) -> &[Tree] {
        &self.raw.trees
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.raw).expect("model serializes")
    }

    /// Scores in model class order.
    fn class_scores(&self, features: [f64; 3]) -> [f64; 4] {
        let mut scores = [0.0; 4];
        scores.copy_from_slice(&self.raw.base_scores);
        for tree in &self.raw.trees {
            let leaf = reach_leaf(tree, &features);
            for (s, l) in scores.iter_mut().zip(leaf) {
                *s += l;
            }
        }
        scores
    }

    pub fn predict(&self, n: f64, k: f64, h: f64) -> Prediction {
        let by_slot = self.class_scores([n, k, h]);
        let mut best = 0;
        for slot in 1..4 {
            if by_slot[slot] > by_slot[best] {
                best = slot;
            }
        }
        let mut scores = [0.0; 4];
        for s in Strategy::ALL {
            scores[s.index()] = by_slot[self.slot_of[s.index()]];
        }
        Prediction {
            strategy: self.raw.classes[best],
            scores,
        }
    }
}

fn reach_leaf<'a>(tree: &'a Tree, features: &[f64; 3]) -> &'a [f64] {
    let mut i = 0;
    loop {
        match &tree.nodes[i] {
            Node::Leaf { leaf } => return leaf,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                i = if features[*feature] < *threshold { *left } else { *right };
            }
        }
    }
}

/// Checks that node 0 roots a binary tree covering every node exactly once.
fn validate_tree(tree: &Tree) -> std::result::Result<(), String> {
    let nodes = &tree.nodes;
    if nodes.is_empty() {
        return Err("no nodes".into());
    }
    let mut seen = vec![false; nodes.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        match &nodes[i] {
            Node::Leaf { leaf } => {
                if leaf.len() != 4 {
                    return Err(format!("node {i}: leaf has {} scores, expected 4", leaf.len()));
                }
                if leaf.iter().any(|s| !s.is_finite()) {
                    return Err(format!("node {i}: non-finite leaf score"));
                }
            }
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if *feature >= FEATURE_NAMES.len() {
                    return Err(format!("node {i}: feature index {feature} out of range"));
                }
                if threshold.is_nan() {
                    return Err(format!("node {i}: NaN threshold"));
                }
                for &child in [left, right] {
                    if child >= nodes.len() {
                        return Err(format!("node {i}: child index {child} out of range"));
                    }
                    if seen[child] {
                        return Err(format!("node {i}: child {child} reached twice (cycle or shared node)"));
                    }
                    seen[child] = true;
                    stack.push(child);
                }
            }
        }
    }
    if let Some(orphan) = seen.iter().position(|s| !s) {
        return Err(format!("node {orphan}: unreachable from root"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_model(leaf: [f64; 4]) -> String {
        serde_json::json!({
            "version": MODEL_VERSION,
            "classes": ["insertion", "counting", "radix", "quick"],
            "feature_names": ["n", "k", "H"],
            "base_scores": [0.0, 0.0, 0.0, 0.0],
            "trees": [{"nodes": [{"leaf": leaf}]}]
        })
        .to_string()
    }

    #[test]
    fn constant_leaf_predicts_insertion() {
        let model = load_model(constant_model([1.0, 0.0, 0.0, 0.0]).as_bytes()).unwrap();
        let p = model.predict(1e6, 10.0, 1.0);
        assert_eq!(p.strategy, Strategy::Insertion);
        assert_eq!(p.scores, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn ties_follow_class_order() {
        let json = serde_json::json!({
            "version": MODEL_VERSION,
            "classes": ["quick", "radix", "counting", "insertion"],
            "feature_names": ["n", "k", "H"],
            "base_scores": [0.0, 0.0, 0.0, 0.0],
            "trees": [{"nodes": [{"leaf": [0.5, 0.5, 0.5, 0.5]}]}]
        });
        let model = load_model(json.to_string().as_bytes()).unwrap();
        assert_eq!(model.predict(1.0, 1.0, 0.0).strategy, Strategy::Quick);
    }

    #[test]
    fn split_goes_left_on_strictly_less() {
        let json = serde_json::json!({
            "version": MODEL_VERSION,
            "classes": ["insertion", "counting", "radix", "quick"],
            "feature_names": ["n", "k", "H"],
            "base_scores": [0.0, 0.0, 0.0, 0.0],
            "trees": [{"nodes": [
                {"feature": 1, "threshold": 100.0, "left": 1, "right": 2},
                {"leaf": [0.0, 1.0, 0.0, 0.0]},
                {"leaf": [0.0, 0.0, 0.0, 1.0]}
            ]}]
        });
        let model = load_model(json.to_string().as_bytes()).unwrap();
        assert_eq!(model.predict(1.0, 99.9, 0.0).strategy, Strategy::Counting);
        assert_eq!(model.predict(1.0, 100.0, 0.0).strategy, Strategy::Quick);
    }

    #[test]
    fn empty_bytes_is_parse_error() {
        assert!(matches!(load_model(b""), Err(Error::ModelParse(_))));
        assert!(matches!(load_model(b"{"), Err(Error::ModelParse(_))));
    }

    fn with_nodes(nodes: serde_json::Value) -> Result<ModelFile> {
        let json = serde_json::json!({
            "version": MODEL_VERSION,
            "classes": ["insertion", "counting", "radix", "quick"],
            "feature_names": ["n", "k", "H"],
            "base_scores": [0.0, 0.0, 0.0, 0.0],
            "trees": [{"nodes": nodes}]
        });
        load_model(json.to_string().as_bytes())
    }

    #[test]
    fn feature_index_out_of_range() {
        let err = with_nodes(serde_json::json!([
            {"feature": 5, "threshold": 1.0, "left": 1, "right": 2},
            {"leaf": [0.0, 0.0, 0.0, 0.0]},
            {"leaf": [0.0, 0.0, 0.0, 0.0]}
        ]))
        .unwrap_err();
        assert!(matches!(err, Error::ModelValidation(_)));
        assert!(err.to_string().contains("tree 0") && err.to_string().contains("node 0"));
    }

    #[test]
    fn cycles_and_bad_children_rejected() {
        let cyclic = with_nodes(serde_json::json!([
            {"feature": 0, "threshold": 1.0, "left": 1, "right": 0},
            {"leaf": [0.0, 0.0, 0.0, 0.0]}
        ]));
        assert!(matches!(cyclic, Err(Error::ModelValidation(_))));
        let dangling = with_nodes(serde_json::json!([
            {"feature": 0, "threshold": 1.0, "left": 1, "right": 9},
            {"leaf": [0.0, 0.0, 0.0, 0.0]}
        ]));
        assert!(matches!(dangling, Err(Error::ModelValidation(_))));
        let short_leaf = with_nodes(serde_json::json!([{"leaf": [0.0, 1.0]}]));
        assert!(matches!(short_leaf, Err(Error::ModelValidation(_))));
        let orphan = with_nodes(serde_json::json!([
            {"leaf": [0.0, 0.0, 0.0, 0.0]},
            {"leaf": [0.0, 0.0, 0.0, 0.0]}
        ]));
        assert!(matches!(orphan, Err(Error::ModelValidation(_))));
    }

    #[test]
    fn version_mismatch() {
        let json = constant_model([1.0, 0.0, 0.0, 0.0]).replace(MODEL_VERSION, "ahs-model/2");
        assert!(matches!(
            load_model(json.as_bytes()),
            Err(Error::UnsupportedModelVersion { .. })
        ));
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&constant_model([1.0, 0.0, 0.0, 0.0])).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(matches!(
            load_model(v.to_string().as_bytes()),
            Err(Error::ModelParse(_))
        ));
    }

    #[test]
    fn duplicate_class_rejected() {
        let json = constant_model([1.0, 0.0, 0.0, 0.0]).replace("\"quick\"", "\"radix\"");
        assert!(matches!(load_model(json.as_bytes()), Err(Error::ModelValidation(_))));
    }
}
