use std::collections::BTreeMap;
use std::fmt::Write;

use super::Document;
use crate::logic::{Atom, Literal, PropFormula, Strength, Sym};

fn list<'a>(items: impl IntoIterator<Item = &'a Sym>) -> String {
    items.into_iter().map(|s| s.as_ref()).collect::<Vec<_>>().join(", ")
}

/// Canonical text: declarations, facts, rules, then the model. Generated
/// from the knowledge base and model, not from the original statements.
pub fn serialize(doc: &Document) -> String {
    let kb = &doc.kb;
    let m = &doc.model;
    let mut out = String::new();
    let w = &mut out;
    let children: Vec<&Sym> = m
        .expansions()
        .flat_map(|(_, x)| [&x.positive, &x.negative])
        .collect();

    if !kb.vocabulary.props.is_empty() {
        let _ = writeln!(w, "prop {}.", list(&kb.vocabulary.props));
    }
    if !m.acts().is_empty() {
        let _ = writeln!(w, "act {}.", list(m.acts()));
    }
    let states: Vec<&Sym> = m.states().iter().filter(|s| !children.contains(s)).collect();
    if !states.is_empty() {
        let _ = writeln!(w, "state {}.", list(states));
    }

    let mut holds: BTreeMap<&Sym, Vec<&PropFormula>> = BTreeMap::new();
    let mut other: Vec<&Literal> = Vec::new();
    let mut assess: Vec<&Literal> = Vec::new();
    for lit in &kb.contingent {
        match &lit.atom {
            Atom::Holds { formula, state } if !lit.negated && formula.len() == 1 => {
                holds.entry(state).or_default().push(formula)
            }
            Atom::Assess { .. } if !lit.negated => assess.push(lit),
            _ => other.push(lit),
        }
    }
    for s in m.states() {
        if let Some(fs) = holds.remove(s) {
            let items: Vec<String> = fs.iter().map(|f| f.to_string()).collect();
            let _ = writeln!(w, "holds {s} : {}.", items.join(", "));
        }
    }
    for (s, fs) in holds {
        let items: Vec<String> = fs.iter().map(|f| f.to_string()).collect();
        let _ = writeln!(w, "holds {s} : {}.", items.join(", "));
    }
    for lit in other {
        let _ = writeln!(w, "evidence {lit}.");
    }
    for lit in &kb.necessary {
        if let Atom::ContrEntry { formula, value } = &lit.atom {
            let _ = writeln!(w, "contr {formula} = {value}.");
        }
    }
    for lit in assess {
        if let Atom::Assess {
            state,
            basis,
            value,
        } = &lit.atom
        {
            if basis.is_empty() {
                let _ = writeln!(w, "utility {state} = {value}.");
            } else {
                let _ = writeln!(w, "assess u({state} | {}) = {value}.", list(basis));
            }
        }
    }
    for r in kb.strict_rules.iter().chain(&kb.defeasible_rules) {
        let kw = match r.strength {
            Strength::Strict => "strict",
            Strength::Defeasible => "presume",
        };
        let _ = writeln!(w, "{kw} {r}.");
    }
    for (act, root) in m.roots() {
        let _ = writeln!(w, "root {act} = {root}.");
    }
    for s in m.pre_order() {
        if let Some(x) = m.expansion(&s) {
            let _ = writeln!(
                w,
                "chance {s} : {} = {} ? {} : {}.",
                x.event, x.probability, x.positive, x.negative
            );
        }
    }
    out
}
