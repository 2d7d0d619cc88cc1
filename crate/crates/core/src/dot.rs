//! Graphviz rendering of a dialectic trace.
//!
//! One cluster per argument, drawn bottom-up (`rankdir=BT`) so inference
//! arrows point up. Defeats get a large arrowhead, interference is a single
//! dashed two-headed edge, and conclusions of undefeated arguments are bold.
//! Only non-trivial arguments for the goal or a rival are drawn, plus
//! whatever attacks a drawn argument.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::dialectic::{EdgeKind, Label, Trace, TraceArgument};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn node_of(arg: &TraceArgument, literal: &str) -> Option<String> {
    arg.derivation
        .iter()
        .position(|s| s.conclusion == literal)
        .map(|i| format!("{}_{i}", arg.id))
}

/// Arguments worth drawing, in trace order.
pub fn drawn(trace: &Trace) -> Vec<&TraceArgument> {
    let by_id: BTreeMap<&str, &TraceArgument> =
        trace.arguments.iter().map(|a| (a.id.as_str(), a)).collect();
    let mut keep: BTreeSet<&str> = trace
        .arguments
        .iter()
        .filter(|a| {
            !a.rules.is_empty() && (a.conclusion == trace.goal || trace.rivals.contains(&a.conclusion))
        })
        .map(|a| a.id.as_str())
        .collect();
    loop {
        let more: Vec<&str> = trace
            .edges
            .iter()
            .filter(|e| keep.contains(e.target.as_str()) && !keep.contains(e.attacker.as_str()))
            .map(|e| e.attacker.as_str())
            .collect();
        if more.is_empty() {
            break;
        }
        keep.extend(more);
    }
    trace
        .arguments
        .iter()
        .filter(|a| keep.contains(a.id.as_str()) && by_id.contains_key(a.id.as_str()))
        .collect()
}

pub fn export_dot(trace: &Trace) -> String {
    let args = drawn(trace);
    let ids: BTreeSet<&str> = args.iter().map(|a| a.id.as_str()).collect();
    let by_id: BTreeMap<&str, &TraceArgument> = args.iter().map(|a| (a.id.as_str(), *a)).collect();
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "digraph dialectic {{");
    let _ = writeln!(w, "  rankdir=BT;");
    let _ = writeln!(w, "  label={};", quote(&format!("{}: {}", trace.goal, trace.verdict)));
    let _ = writeln!(w, "  labelloc=t;");
    let _ = writeln!(w, "  node [shape=plaintext, fontname=\"Helvetica\"];");
    for a in &args {
        let _ = writeln!(w, "  subgraph cluster_{} {{", a.id);
        let _ = writeln!(w, "    label={};", quote(&format!("{} {}", a.id, a.label)));
        let last = a.derivation.len().saturating_sub(1);
        for (i, step) in a.derivation.iter().enumerate() {
            let mut attrs = vec![format!("label={}", quote(&step.conclusion))];
            if i == last {
                attrs.push("shape=underline".into());
                if a.label == Label::Undefeated {
                    attrs.push("style=bold".into());
                    attrs.push("penwidth=3".into());
                }
            }
            let _ = writeln!(w, "    {}_{i} [{}];", a.id, attrs.join(", "));
        }
        for (i, step) in a.derivation.iter().enumerate() {
            for p in &step.premises {
                if let Some(from) = node_of(a, p) {
                    let _ = writeln!(w, "    {from} -> {}_{i};", a.id);
                }
            }
        }
        let _ = writeln!(w, "  }}");
    }
    let mut drawn_pairs: BTreeSet<(String, String)> = BTreeSet::new();
    for e in &trace.edges {
        if !ids.contains(e.attacker.as_str()) || !ids.contains(e.target.as_str()) {
            continue;
        }
        let (x, y) = (by_id[e.attacker.as_str()], by_id[e.target.as_str()]);
        let from = node_of(x, &x.conclusion).unwrap_or_else(|| format!("{}_0", x.id));
        let Some(to) = node_of(y, &e.point) else { continue };
        match e.kind {
            EdgeKind::Defeat => {
                let _ = writeln!(
                    w,
                    "  {from} -> {to} [class=\"defeat\", arrowhead=normal, arrowsize=2, penwidth=2];"
                );
            }
            EdgeKind::Interference => {
                let mutual = trace.edges.iter().any(|r| {
                    r.kind == EdgeKind::Interference
                        && r.attacker == e.target
                        && r.target == e.attacker
                });
                let pair = if from <= to {
                    (from.clone(), to.clone())
                } else {
                    (to.clone(), from.clone())
                };
                if mutual && !drawn_pairs.insert(pair) {
                    continue;
                }
                let dir = if mutual { "both" } else { "forward" };
                let _ = writeln!(
                    w,
                    "  {from} -> {to} [class=\"interference\", style=dashed, dir={dir}];"
                );
            }
        }
    }
    let _ = writeln!(w, "}}");
    out
}
