//! Human-readable output.

use std::fmt::Write;

use argdec::dialectic::EdgeKind;
use argdec::model::SalientModel;
use argdec::{Recommendation, Trace};

pub fn verdict_line(trace: &Trace) -> String {
    let mut out = format!("{} {}", trace.verdict, trace.goal);
    if trace.partial {
        out.push_str(" (partial)");
    }
    out
}

pub fn trace(t: &Trace) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "goal: {}", t.goal);
    let _ = writeln!(w, "verdict: {}", t.verdict);
    if !t.rivals.is_empty() {
        let _ = writeln!(w, "rivals: {}", t.rivals.join("; "));
    }
    for a in &t.arguments {
        let _ = writeln!(w, "{} {} {}", a.id, a.label, a.conclusion);
        if !a.contingent_base.is_empty() {
            let _ = writeln!(w, "  base: {}", a.contingent_base.join("; "));
        }
        for step in &a.derivation {
            match &step.rule {
                Some(rule) => {
                    let _ = writeln!(w, "  {}  by {rule}", step.conclusion);
                }
                None => {
                    let _ = writeln!(w, "  {}", step.conclusion);
                }
            }
        }
    }
    if !t.edges.is_empty() {
        let _ = writeln!(w, "attacks:");
        for e in &t.edges {
            let verb = match e.kind {
                EdgeKind::Defeat => "defeats",
                EdgeKind::Interference => "interferes with",
            };
            let _ = writeln!(w, "  {} {verb} {} at {}", e.attacker, e.target, e.point);
        }
    }
    for n in &t.notes {
        let _ = writeln!(w, "note: {n}");
    }
    out
}

pub fn recommendation(r: &Recommendation) -> String {
    let mut out = format!("{}\n", r.summary);
    for a in &r.acts {
        match &a.utility {
            Some(u) => {
                let _ = writeln!(out, "  {} {} u={u}", a.act, a.verdict);
            }
            None => {
                let _ = writeln!(out, "  {} {}", a.act, a.verdict);
            }
        }
    }
    out
}

pub fn salient(s: &SalientModel, model_text: &str) -> String {
    let mut out = String::new();
    let w = &mut out;
    if let Some(n) = &s.notice {
        let _ = writeln!(w, "{n}");
        return out;
    }
    let _ = writeln!(w, "salient: {}", s.salient.join(", "));
    for p in &s.paths {
        let _ = writeln!(w, "path {}: {} (mass {})", p.act, p.states.join(" > "), p.mass);
    }
    for (act, mass) in &s.coverage {
        let _ = writeln!(w, "coverage {act}: {mass}");
    }
    let _ = writeln!(w, "model:");
    for line in model_text.lines() {
        let _ = writeln!(w, "  {line}");
    }
    out
}
