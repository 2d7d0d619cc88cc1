//! Specificity: the argument that uses more information wins.
//!
//! `a` is at least as specific as `b` when every set of contingent facts
//! (drawn from both arguments' bases) that non-trivially activates `a` also
//! activates `b`. Three comparisons between numeric claims on the same
//! quantity are settled first: an expected-utility derivation over a plain
//! valuation, an assessment over one with a strictly smaller basis, and a
//! contribution resting on table entries that cover the other side's entries.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::argument::{ArgKey, Argument};
use crate::logic::{Atom, FdKey, LitId, PropFormula, RuleId, Schema};
use crate::schemata::Theory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Specificity {
    AStrict,
    BStrict,
    Equivalent,
    Incomparable,
}

impl Specificity {
    pub fn flip(self) -> Self {
        match self {
            Specificity::AStrict => Specificity::BStrict,
            Specificity::BStrict => Specificity::AStrict,
            x => x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Comparison {
    pub outcome: Specificity,
    /// The activation test was replaced by base inclusion.
    pub approximate: bool,
}

fn top_schema<'t>(theory: &'t Theory, a: &Argument) -> Option<&'t Schema> {
    a.derivation.rule.and_then(|r| theory.rule(r).schema())
}

fn basis(theory: &Theory, a: &Argument) -> Option<BTreeSet<String>> {
    let r = a.derivation.rule?;
    match theory.rule(r).body.first().map(|l| &l.atom) {
        Some(Atom::Assess { basis, .. }) => Some(basis.iter().map(|s| s.to_string()).collect()),
        _ => None,
    }
}

fn entries(theory: &Theory, a: &Argument) -> Vec<PropFormula> {
    let mut out = Vec::new();
    a.derivation.walk(&mut |d| {
        if let Atom::ContrEntry { formula, .. } = &theory.literal(d.literal).atom {
            out.push(formula.clone());
        }
    });
    out
}

fn covers(wide: &[PropFormula], narrow: &[PropFormula]) -> bool {
    narrow
        .iter()
        .all(|n| wide.iter().any(|w| w.includes(n)))
}

fn priority(theory: &Theory, a: &Argument, b: &Argument) -> Option<Specificity> {
    let ka = theory.literal(a.conclusion).fd_key().map(|(k, _)| k);
    let kb = theory.literal(b.conclusion).fd_key().map(|(k, _)| k);
    let key = match (ka, kb) {
        (Some(x), Some(y)) if x == y => x,
        _ => return None,
    };
    match key {
        FdKey::Utility(_) => {
            let eu = |x: &Argument| {
                matches!(top_schema(theory, x), Some(Schema::ExpectedUtility { .. }))
            };
            let direct = |x: &Argument| {
                matches!(
                    top_schema(theory, x),
                    Some(Schema::StateProperty | Schema::Assessment)
                )
            };
            if eu(a) && direct(b) {
                return Some(Specificity::AStrict);
            }
            if eu(b) && direct(a) {
                return Some(Specificity::BStrict);
            }
            if let (Some(x), Some(y)) = (basis(theory, a), basis(theory, b)) {
                if x.is_superset(&y) && x.len() > y.len() {
                    return Some(Specificity::AStrict);
                }
                if y.is_superset(&x) && y.len() > x.len() {
                    return Some(Specificity::BStrict);
                }
            }
            None
        }
        FdKey::Contr(_) => {
            let (ea, eb) = (entries(theory, a), entries(theory, b));
            if ea.is_empty() || eb.is_empty() {
                return None;
            }
            match (covers(&ea, &eb), covers(&eb, &ea)) {
                (true, false) => Some(Specificity::AStrict),
                (false, true) => Some(Specificity::BStrict),
                _ => None,
            }
        }
        _ => None,
    }
}

pub fn more_specific(theory: &Theory, a: &Argument, b: &Argument, cap: usize) -> Comparison {
    more_specific_with(theory, a, b, cap, &mut Activations::default())
}

/// [`more_specific`] sharing activation sets across calls over one theory.
pub fn more_specific_with(
    theory: &Theory,
    a: &Argument,
    b: &Argument,
    cap: usize,
    cache: &mut Activations,
) -> Comparison {
    if a.key() == b.key() {
        return Comparison {
            outcome: Specificity::Equivalent,
            approximate: false,
        };
    }
    if let Some(outcome) = priority(theory, a, b) {
        return Comparison {
            outcome,
            approximate: false,
        };
    }
    let universe: BTreeSet<LitId> = a.base.union(&b.base).copied().collect();
    if universe.len() > cap {
        let outcome = if a.base == b.base {
            Specificity::Equivalent
        } else if a.base.is_superset(&b.base) {
            Specificity::AStrict
        } else if b.base.is_superset(&a.base) {
            Specificity::BStrict
        } else {
            Specificity::Incomparable
        };
        return Comparison {
            outcome,
            approximate: true,
        };
    }
    let (a_ge_b, b_ge_a) = match (cache.terms(theory, a), cache.terms(theory, b)) {
        (Some(ta), Some(tb)) => {
            let trivial = cache.strict(theory);
            (
                covered(&ta, &tb, trivial.get(&a.conclusion), &universe),
                covered(&tb, &ta, trivial.get(&b.conclusion), &universe),
            )
        }
        _ => by_subsets(theory, a, b, &universe),
    };
    let outcome = match (a_ge_b, b_ge_a) {
        (true, true) => Specificity::Equivalent,
        (true, false) => Specificity::AStrict,
        (false, true) => Specificity::BStrict,
        (false, false) => Specificity::Incomparable,
    };
    Comparison {
        outcome,
        approximate: false,
    }
}

type Term = BTreeSet<LitId>;

/// Above this many terms for one literal, activation falls back to subset
/// enumeration.
const TERM_LIMIT: usize = 512;

/// Minimal sets of contingent evidence that derive each literal, with
/// necessary knowledge and strict rules always available.
#[derive(Default)]
pub struct Activations {
    strict: Option<HashMap<LitId, Vec<Term>>>,
    by_arg: HashMap<ArgKey, Option<Vec<Term>>>,
}

impl Activations {
    fn strict(&mut self, theory: &Theory) -> &HashMap<LitId, Vec<Term>> {
        self.strict
            .get_or_insert_with(|| minimal_terms(theory, &|_| false).unwrap_or_default())
    }

    fn terms(&mut self, theory: &Theory, arg: &Argument) -> Option<Vec<Term>> {
        self.by_arg
            .entry(arg.key())
            .or_insert_with(|| {
                minimal_terms(theory, &|r| arg.support.contains(&r))
                    .map(|m| m.get(&arg.conclusion).cloned().unwrap_or_default())
            })
            .clone()
    }
}

fn add_term(terms: &mut Vec<Term>, t: Term) -> bool {
    if terms.iter().any(|x| x.is_subset(&t)) {
        return false;
    }
    terms.retain(|x| !t.is_subset(x));
    terms.push(t);
    true
}

/// Fixpoint of minimal derivation terms over the enabled rules. `None` when
/// some literal collects more than [`TERM_LIMIT`] terms.
fn minimal_terms(
    theory: &Theory,
    enabled: &dyn Fn(RuleId) -> bool,
) -> Option<HashMap<LitId, Vec<Term>>> {
    let index = theory.index();
    let mut terms: HashMap<LitId, Vec<Term>> = HashMap::new();
    for &n in theory.necessary() {
        terms.insert(n, vec![Term::new()]);
    }
    for &e in theory.evidence() {
        if !theory.literal(e).is_necessary_kind() {
            add_term(terms.entry(e).or_default(), Term::from([e]));
        }
    }
    let rules: Vec<RuleId> = (0..index.rules().len())
        .filter(|&r| index.is_strict(r) || enabled(r))
        .collect();
    loop {
        let mut changed = false;
        for &r in &rules {
            let body = index.rule_body(r);
            if !body.iter().all(|b| terms.contains_key(b)) {
                continue;
            }
            let mut product = vec![Term::new()];
            for b in body {
                let mut next = Vec::new();
                for x in &product {
                    for y in &terms[b] {
                        add_term(&mut next, x.union(y).copied().collect());
                    }
                }
                if next.len() > TERM_LIMIT {
                    return None;
                }
                product = next;
            }
            let head = terms.entry(index.rule_head(r)).or_default();
            for t in product {
                changed |= add_term(head, t);
            }
            if head.len() > TERM_LIMIT {
                return None;
            }
        }
        if !changed {
            return Some(terms);
        }
    }
}

/// Whether every set inside `universe` that activates the first argument
/// non-trivially also activates the second. Activation is monotone, so the
/// minimal activating sets are enough.
fn covered(first: &[Term], second: &[Term], trivial: Option<&Vec<Term>>, universe: &Term) -> bool {
    first
        .iter()
        .filter(|m| m.is_subset(universe))
        .filter(|m| !trivial.is_some_and(|t| t.iter().any(|x| x.is_subset(m))))
        .all(|m| second.iter().any(|x| x.is_subset(m)))
}

fn by_subsets(theory: &Theory, a: &Argument, b: &Argument, universe: &Term) -> (bool, bool) {
    let universe: Vec<LitId> = universe.iter().copied().collect();
    let mut a_ge_b = true;
    let mut b_ge_a = true;
    for mask in 0u64..(1 << universe.len()) {
        if !a_ge_b && !b_ge_a {
            break;
        }
        let e: Vec<LitId> = universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &l)| l)
            .collect();
        let (act_a, nt_a) = activation(theory, a, &e);
        let (act_b, nt_b) = activation(theory, b, &e);
        if nt_a && !act_b {
            a_ge_b = false;
        }
        if nt_b && !act_a {
            b_ge_a = false;
        }
    }
    (a_ge_b, b_ge_a)
}

/// Whether `e` plus necessary knowledge activates `arg` with its rules read
/// as strict, and whether it does so non-trivially.
fn activation(theory: &Theory, arg: &Argument, e: &[LitId]) -> (bool, bool) {
    let seeds = || theory.necessary().iter().chain(e.iter()).copied();
    let with = theory
        .index()
        .closure(seeds(), &|r| arg.support.contains(&r));
    if !with.contains(arg.conclusion) {
        return (false, false);
    }
    let without = theory.index().closure(seeds(), &|_| false);
    (true, !without.contains(arg.conclusion))
}

/// Base-closure test: `b`'s contingent base follows strictly from necessary
/// knowledge and `a`'s base. Used as a cross-check of the activation test.
pub fn base_entails(theory: &Theory, a: &Argument, b: &Argument) -> bool {
    let closure = theory
        .index()
        .closure(theory.necessary().iter().chain(a.base.iter()).copied(), &|_| false);
    b.base.iter().all(|&l| closure.contains(l))
}
