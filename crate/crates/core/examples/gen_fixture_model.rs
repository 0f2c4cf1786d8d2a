//! Writes a small tree ensemble that reproduces the default rule engine for
//! `n >= 1000`, used as a test fixture for the classifier path.
//!
//! Usage: `cargo run -p ahs-core --example gen_fixture_model [OUT]`

use std::path::PathBuf;

use ahs_core::classifier::{ModelFile, Node, RawModel, Tree, FEATURE_NAMES, MODEL_VERSION};
use ahs_core::{Strategy, Thresholds};

const CLASSES: [Strategy; 4] = [
    Strategy::Insertion,
    Strategy::Counting,
    Strategy::Radix,
    Strategy::Quick,
];
/// Band edges per octave of `k` in the entropy tree.
const BANDS_PER_OCTAVE: u32 = 4;

fn leaf(s: Strategy, w: f64) -> Node {
    let mut v = vec![0.0; 4];
    v[CLASSES.iter().position(|&c| c == s).unwrap()] = w;
    Node::Leaf { leaf: v }
}

fn split(nodes: &mut Vec<Node>, feature: usize, threshold: f64) -> usize {
    nodes.push(Node::Split {
        feature,
        threshold,
        left: 0,
        right: 0,
    });
    nodes.len() - 1
}

fn set_children(nodes: &mut [Node], at: usize, l: usize, r: usize) {
    if let Node::Split { left, right, .. } = &mut nodes[at] {
        *left = l;
        *right = r;
    }
}

/// Tree A: range rules. Above `k_radix` radix and quick tie, tree B decides.
fn range_tree(th: &Thresholds) -> Tree {
    let mut nodes = Vec::new();
    let root = split(&mut nodes, 1, th.k_counting as f64 + 0.5);
    nodes.push(leaf(Strategy::Counting, 2.0));
    let wide = split(&mut nodes, 1, th.k_radix as f64 + 0.5);
    set_children(&mut nodes, root, 1, wide);
    nodes.push(leaf(Strategy::Quick, 2.0));
    let quick = nodes.len() - 1;
    nodes.push(Node::Leaf {
        leaf: vec![0.0, 0.0, 1.0, 1.0],
    });
    set_children(&mut nodes, wide, quick, quick + 1);
    Tree { nodes }
}

/// Tree B: entropy rule `H < c·log2 k`, piecewise constant over bands of k.
fn entropy_tree(th: &Thresholds) -> Tree {
    let lo = th.k_radix as f64 + 0.5;
    let step = 2f64.powf(1.0 / BANDS_PER_OCTAVE as f64);
    let mut edges = vec![lo];
    while *edges.last().unwrap() < 2f64.powi(64) {
        let next = edges.last().unwrap() * step;
        edges.push(next);
    }

    fn build(nodes: &mut Vec<Node>, edges: &[f64], coeff: f64) -> usize {
        if edges.len() == 2 {
            let mid = (edges[0] * edges[1]).sqrt();
            let at = split(nodes, 2, coeff * mid.log2());
            nodes.push(leaf(Strategy::Radix, 1.0));
            nodes.push(leaf(Strategy::Quick, 1.0));
            set_children(nodes, at, at + 1, at + 2);
            return at;
        }
        let m = edges.len() / 2;
        let at = split(nodes, 1, edges[m]);
        let l = build(nodes, &edges[..=m], coeff);
        let r = build(nodes, &edges[m..], coeff);
        set_children(nodes, at, l, r);
        at
    }

    let mut nodes = Vec::new();
    let root = split(&mut nodes, 1, lo);
    nodes.push(Node::Leaf { leaf: vec![0.0; 4] });
    let bands = build(&mut nodes, &edges, th.entropy_coeff);
    set_children(&mut nodes, root, 1, bands);
    Tree { nodes }
}

fn main() {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/fsm_fixture_model.json"));
    let th = Thresholds::default();
    let raw = RawModel {
        version: MODEL_VERSION.to_owned(),
        classes: CLASSES.to_vec(),
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        base_scores: vec![0.0; 4],
        trees: vec![range_tree(&th), entropy_tree(&th)],
    };
    let model = ModelFile::new(raw).expect("fixture model is valid");
    std::fs::write(&out, model.to_json() + "\n").expect("write fixture");
    eprintln!("wrote {}", out.display());
}
