#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write;
use std::path::PathBuf;

use argdec::logic::{LitId, RuleId};
use argdec::{parse, Document, Theory, Value};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap()
}

pub fn corpus(name: &str) -> Document {
    parse(&corpus_text(name)).unwrap()
}

pub const GOLDEN: [&str; 7] = [
    "alfa_modelA.kb",
    "alfa.kb",
    "alfa_qualitative.kb",
    "alfa_qualitative_combined.kb",
    "smoking.kb",
    "reinstatement.kb",
    "empty.kb",
];

pub fn rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Value {
    let den = *[1, 1, 2, 3, 4, 5].choose(rng).unwrap();
    Value::ratio(rng.gen_range(lo * den..=hi * den), den)
}

pub fn probability(rng: &mut ChaCha8Rng) -> Value {
    let den = rng.gen_range(1..=10);
    Value::ratio(rng.gen_range(0..=den), den)
}

/// A state of a generated decision tree.
#[derive(Debug, Clone)]
pub struct Node {
    pub name: String,
    pub split: Option<(String, Value, Box<Node>, Box<Node>)>,
    /// `(basis, value)`; an empty basis renders as `utility`.
    pub values: Vec<(Vec<String>, Value)>,
    pub props: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TreeModel {
    pub acts: Vec<(String, Node)>,
    pub entries: Vec<(Vec<String>, Value)>,
}

#[derive(Debug, Clone, Copy)]
pub struct TreeShape {
    pub max_depth: usize,
    pub max_states: usize,
    pub max_acts: usize,
    /// Leaves may carry a second assessment on a strictly larger basis.
    pub refined_leaves: bool,
    /// Expanded states may keep a direct assessment of their own.
    pub internal_values: bool,
    /// Leaves may describe themselves with properties that carry
    /// contributions.
    pub contributions: bool,
}

struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    shape: TreeShape,
    states: usize,
    events: usize,
}

impl Gen<'_> {
    fn fresh(&mut self) -> String {
        self.states += 1;
        format!("s{}", self.states - 1)
    }

    fn leaf_values(&mut self) -> Vec<(Vec<String>, Value)> {
        let v = rational(self.rng, -20, 20);
        if self.rng.gen_bool(0.3) {
            return vec![(vec![], v)];
        }
        let mut out = vec![(vec!["b0".to_string()], v)];
        if self.shape.refined_leaves && self.rng.gen_bool(0.35) {
            out.push((
                vec!["b0".to_string(), "b1".to_string()],
                rational(self.rng, -20, 20),
            ));
        }
        out
    }

    fn node(&mut self, name: String, depth: usize) -> Node {
        let can_split = depth < self.shape.max_depth && self.states + 2 <= self.shape.max_states;
        if can_split && self.rng.gen_bool(0.65) {
            let event = format!("e{}", self.events);
            self.events += 1;
            let k = probability(self.rng);
            let (p, n) = (self.fresh(), self.fresh());
            let pos = self.node(p, depth + 1);
            let neg = self.node(n, depth + 1);
            let values = if self.shape.internal_values && self.rng.gen_bool(0.25) {
                vec![(vec!["b0".to_string()], rational(self.rng, -20, 20))]
            } else {
                vec![]
            };
            return Node {
                name,
                split: Some((event, k, Box::new(pos), Box::new(neg))),
                values,
                props: vec![],
            };
        }
        let props = if self.shape.contributions && self.rng.gen_bool(0.5) {
            let mut ps: Vec<String> = ["P", "Q", "R"]
                .iter()
                .filter(|_| self.rng.gen_bool(0.5))
                .map(|s| s.to_string())
                .collect();
            if ps.is_empty() {
                ps.push("P".into());
            }
            ps
        } else {
            vec![]
        };
        let values = if props.is_empty() || self.rng.gen_bool(0.3) {
            self.leaf_values()
        } else {
            vec![]
        };
        Node {
            name,
            split: None,
            values,
            props,
        }
    }
}

pub fn random_tree(rng: &mut ChaCha8Rng, shape: TreeShape) -> TreeModel {
    let n_acts = rng.gen_range(1..=shape.max_acts);
    let mut g = Gen {
        rng,
        shape,
        states: 0,
        events: 0,
    };
    let mut acts = Vec::new();
    for i in 0..n_acts {
        if g.states >= shape.max_states {
            break;
        }
        let root = g.fresh();
        acts.push((format!("a{i}"), g.node(root, 0)));
    }
    let entries = if shape.contributions {
        let mut e = vec![];
        for p in ["P", "Q", "R"] {
            e.push((vec![p.to_string()], rational(g.rng, -10, 10)));
        }
        if g.rng.gen_bool(0.5) {
            e.push((vec!["P".into(), "Q".into()], rational(g.rng, -10, 10)));
        }
        e
    } else {
        vec![]
    };
    TreeModel { acts, entries }
}

impl TreeModel {
    pub fn render(&self, scale: &Value) -> String {
        let mut out = String::from("prop b0, b1, P, Q, R.\n");
        let acts: Vec<&str> = self.acts.iter().map(|(a, _)| a.as_str()).collect();
        let _ = writeln!(out, "act {}.", acts.join(", "));
        for (a, root) in &self.acts {
            let _ = writeln!(out, "state {}.", root.name);
            let _ = writeln!(out, "root {a} = {}.", root.name);
        }
        for (f, v) in &self.entries {
            let _ = writeln!(out, "contr {} = {}.", f.join(" & "), scale * v);
        }
        for (_, root) in &self.acts {
            render_node(root, scale, &mut out);
        }
        out
    }

    pub fn states(&self) -> Vec<String> {
        let mut out = Vec::new();
        fn walk(n: &Node, out: &mut Vec<String>) {
            out.push(n.name.clone());
            if let Some((_, _, p, q)) = &n.split {
                walk(p, out);
                walk(q, out);
            }
        }
        for (_, r) in &self.acts {
            walk(r, &mut out);
        }
        out
    }
}

fn render_node(n: &Node, scale: &Value, out: &mut String) {
    if let Some((e, k, p, q)) = &n.split {
        let _ = writeln!(out, "chance {} : {e} = {k} ? {} : {}.", n.name, p.name, q.name);
        render_node(p, scale, out);
        render_node(q, scale, out);
    }
    if !n.props.is_empty() {
        let _ = writeln!(out, "holds {} : {}.", n.name, n.props.join(", "));
    }
    for (basis, v) in &n.values {
        let v = scale * v;
        if basis.is_empty() {
            let _ = writeln!(out, "utility {} = {v}.", n.name);
        } else {
            let _ = writeln!(out, "assess u({} | {}) = {v}.", n.name, basis.join(", "));
        }
    }
}

/// A small propositional knowledge base over one state, with at most
/// `max_rules` rules.
pub fn random_rule_kb(rng: &mut ChaCha8Rng, max_rules: usize) -> String {
    let props = ["p0", "p1", "p2", "p3", "p4", "p5"];
    let lit = |rng: &mut ChaCha8Rng| {
        let p = props.choose(rng).unwrap();
        if rng.gen_bool(0.3) {
            format!("~holds({p}, s)")
        } else {
            format!("holds({p}, s)")
        }
    };
    let mut out = String::from("prop p0, p1, p2, p3, p4, p5.\nstate s.\n");
    let mut seen = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=3) {
        let p = props[rng.gen_range(0..3)];
        if seen.insert(p) {
            let _ = writeln!(out, "evidence holds({p}, s).");
        }
    }
    for i in 0..rng.gen_range(1..=max_rules) {
        let n_body = rng.gen_range(0..=2);
        let body: Vec<String> = (0..n_body).map(|_| lit(rng)).collect();
        let head = lit(rng);
        if rng.gen_bool(0.2) {
            let _ = writeln!(out, "strict s{i}: {} -> {head}.", body.join(", "));
        } else {
            let _ = writeln!(out, "presume r{i}: {} => {head}.", body.join(", "));
        }
    }
    out
}

/// Activation test written from the definition, for cross-checking.
pub fn activates(theory: &Theory, support: &BTreeSet<RuleId>, conclusion: LitId, e: &[LitId]) -> (bool, bool) {
    let seeds: Vec<LitId> = theory.necessary().iter().chain(e).copied().collect();
    let with = theory
        .index()
        .closure(seeds.iter().copied(), &|r| support.contains(&r));
    let without = theory.index().closure(seeds.iter().copied(), &|_| false);
    (with.contains(conclusion), !without.contains(conclusion))
}
