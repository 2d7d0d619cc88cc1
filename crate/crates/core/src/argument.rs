//! Argument construction by backward chaining, and the brute-force
//! enumeration used to check it.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::EngineError;
use crate::logic::{LitId, Literal, RuleId};
use crate::schemata::Theory;

/// Largest defeasible rule set the enumeration oracle accepts.
pub const ORACLE_LIMIT: usize = 20;

/// A proof tree. Leaves (`rule == None`) are strict consequences of the
/// evidence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Derivation {
    pub literal: LitId,
    pub rule: Option<RuleId>,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    fn leaf(literal: LitId) -> Self {
        Derivation {
            literal,
            rule: None,
            premises: Vec::new(),
        }
    }

    pub fn support(&self, theory: &Theory) -> BTreeSet<RuleId> {
        let mut out = BTreeSet::new();
        self.walk(&mut |d| {
            if let Some(r) = d.rule {
                if !theory.index().is_strict(r) {
                    out.insert(r);
                }
            }
        });
        out
    }

    pub fn literals(&self) -> BTreeSet<LitId> {
        let mut out = BTreeSet::new();
        self.walk(&mut |d| {
            out.insert(d.literal);
        });
        out
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Derivation)) {
        f(self);
        for p in &self.premises {
            p.walk(f);
        }
    }

    fn find(&self, literal: LitId, theory: &Theory) -> Option<&Derivation> {
        if self.literal == literal && !self.support(theory).is_empty() {
            return Some(self);
        }
        self.premises.iter().find_map(|p| p.find(literal, theory))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Argument {
    pub conclusion: LitId,
    /// Defeasible rule instances used.
    pub support: BTreeSet<RuleId>,
    pub derivation: Derivation,
    /// Sub-conclusions that rest on at least one defeasible rule; the places
    /// where the argument can be attacked.
    pub points: BTreeSet<LitId>,
    /// Contingent evidence under the leaves.
    pub base: BTreeSet<LitId>,
}

impl Argument {
    pub fn from_derivation(theory: &Theory, derivation: Derivation) -> Argument {
        let support = derivation.support(theory);
        let mut points = BTreeSet::new();
        collect_points(theory, &derivation, &mut points);
        let mut base = BTreeSet::new();
        derivation.walk(&mut |d| {
            if d.rule.is_some() {
                return;
            }
            let leaves = match theory.grounds(d.literal) {
                Some(g) => g.iter().copied().collect(),
                None => vec![d.literal],
            };
            for l in leaves {
                if !theory.literal(l).is_necessary_kind() {
                    base.insert(l);
                }
            }
        });
        Argument {
            conclusion: derivation.literal,
            support,
            derivation,
            points,
            base,
        }
    }

    /// The part of this argument that concludes `point`.
    pub fn sub_argument(&self, theory: &Theory, point: LitId) -> Option<Argument> {
        self.derivation
            .find(point, theory)
            .map(|d| Argument::from_derivation(theory, d.clone()))
    }

    pub fn key(&self) -> ArgKey {
        ArgKey {
            conclusion: self.conclusion,
            support: self.support.clone(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.support.is_empty()
    }
}

fn collect_points(theory: &Theory, d: &Derivation, out: &mut BTreeSet<LitId>) -> bool {
    let mut defeasible = d.rule.is_some_and(|r| !theory.index().is_strict(r));
    for p in &d.premises {
        defeasible |= collect_points(theory, p, out);
    }
    if defeasible {
        out.insert(d.literal);
    }
    defeasible
}

/// Identity of an argument: what it concludes and which reasons it uses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ArgKey {
    pub conclusion: LitId,
    pub support: BTreeSet<RuleId>,
}

#[derive(Debug, Clone, Default)]
pub struct Constructed {
    pub arguments: Vec<Argument>,
    pub partial: bool,
    pub steps: usize,
}

/// True when `support` with the evidence derives `goal`, is consistent, and
/// no rule can be dropped.
pub fn is_argument(theory: &Theory, goal: LitId, support: &BTreeSet<RuleId>) -> bool {
    let closure = theory.closure_with(support);
    if !closure.contains(goal) || !theory.index().consistent(&closure) {
        return false;
    }
    support.iter().all(|&r| {
        let smaller: BTreeSet<RuleId> = support.iter().copied().filter(|&x| x != r).collect();
        !theory.closure_with(&smaller).contains(goal)
    })
}

/// All minimal consistent arguments for `goal` reachable within `budget`
/// rule expansions.
pub fn construct_arguments(theory: &Theory, goal: &Literal, budget: usize) -> Constructed {
    let Some(goal) = theory.lookup(goal) else {
        return Constructed::default();
    };
    construct_for(theory, goal, budget)
}

pub fn construct_for(theory: &Theory, goal: LitId, budget: usize) -> Constructed {
    let mut search = Search {
        theory,
        budget,
        steps: 0,
        partial: false,
        memo: HashMap::new(),
    };
    let (found, _) = search.solve(goal, &mut Vec::new());
    let mut seen = BTreeSet::new();
    let mut arguments = Vec::new();
    for d in found {
        let arg = Argument::from_derivation(theory, d);
        if seen.insert(arg.support.clone()) && is_argument(theory, goal, &arg.support) {
            arguments.push(arg);
        }
    }
    arguments.sort_by_key(|a| a.key());
    Constructed {
        arguments,
        partial: search.partial,
        steps: search.steps,
    }
}

struct Search<'a> {
    theory: &'a Theory,
    budget: usize,
    steps: usize,
    partial: bool,
    memo: HashMap<LitId, Vec<Derivation>>,
}

struct Combo {
    support: BTreeSet<RuleId>,
    premises: Vec<Derivation>,
    literals: BTreeSet<LitId>,
}

impl Search<'_> {
    fn clashes(&self, a: &BTreeSet<LitId>, b: &BTreeSet<LitId>) -> bool {
        a.iter().any(|&x| {
            self.theory
                .index()
                .clashes_with(x)
                .iter()
                .any(|y| b.contains(y))
        })
    }

    /// Derivations of `lit`, reduced to minimal supports. The flag reports
    /// whether a cycle was cut below, in which case the result depends on
    /// the ancestors and is not memoized.
    fn solve(&mut self, lit: LitId, stack: &mut Vec<LitId>) -> (Vec<Derivation>, bool) {
        if self.theory.strict_base().contains(lit) {
            return (vec![Derivation::leaf(lit)], false);
        }
        if let Some(hit) = self.memo.get(&lit) {
            return (hit.clone(), false);
        }
        if stack.contains(&lit) {
            return (Vec::new(), true);
        }
        stack.push(lit);
        let index = self.theory.index();
        let mut cyclic = false;
        let mut out: Vec<(BTreeSet<RuleId>, Derivation)> = Vec::new();
        for &r in index.rules_for(lit) {
            if self.steps >= self.budget {
                self.partial = true;
                break;
            }
            self.steps += 1;
            let mut combos = vec![Combo {
                support: BTreeSet::new(),
                premises: Vec::new(),
                literals: BTreeSet::from([lit]),
            }];
            for &b in index.rule_body(r) {
                let (ds, c) = self.solve(b, stack);
                cyclic |= c;
                let mut next = Vec::new();
                for combo in &combos {
                    for d in &ds {
                        let lits = d.literals();
                        if self.clashes(&lits, &combo.literals) {
                            continue;
                        }
                        let mut support = combo.support.clone();
                        support.extend(d.support(self.theory));
                        let mut premises = combo.premises.clone();
                        premises.push(d.clone());
                        let mut literals = combo.literals.clone();
                        literals.extend(lits);
                        next.push(Combo {
                            support,
                            premises,
                            literals,
                        });
                    }
                }
                combos = minimal_combos(next);
                if combos.is_empty() {
                    break;
                }
            }
            for combo in combos {
                let mut support = combo.support;
                if !index.is_strict(r) {
                    support.insert(r);
                }
                out.push((
                    support,
                    Derivation {
                        literal: lit,
                        rule: Some(r),
                        premises: combo.premises,
                    },
                ));
            }
        }
        stack.pop();
        let result = antichain(out);
        if !cyclic && !self.partial {
            self.memo.insert(lit, result.clone());
        }
        (result, cyclic)
    }
}

fn minimal_combos(mut combos: Vec<Combo>) -> Vec<Combo> {
    combos.sort_by(|a, b| {
        (a.support.len(), &a.support, &a.premises).cmp(&(b.support.len(), &b.support, &b.premises))
    });
    let mut kept: Vec<Combo> = Vec::new();
    for c in combos {
        if kept.iter().all(|k| !k.support.is_subset(&c.support)) {
            kept.push(c);
        }
    }
    kept
}

fn antichain(mut found: Vec<(BTreeSet<RuleId>, Derivation)>) -> Vec<Derivation> {
    found.sort_by(|a, b| (a.0.len(), &a.0, &a.1).cmp(&(b.0.len(), &b.0, &b.1)));
    let mut kept: Vec<(BTreeSet<RuleId>, Derivation)> = Vec::new();
    for (s, d) in found {
        if kept.iter().all(|(k, _)| !k.is_subset(&s)) {
            kept.push((s, d));
        }
    }
    kept.into_iter().map(|(_, d)| d).collect()
}

/// Exhaustive enumeration over subsets of the defeasible rules, sharing no
/// code with the backward search beyond forward closure.
pub fn enumerate_all_arguments(
    theory: &Theory,
    size_bound: usize,
) -> Result<BTreeSet<ArgKey>, EngineError> {
    let rules = theory.defeasible_rules();
    if rules.len() > ORACLE_LIMIT {
        return Err(EngineError::OracleScale {
            count: rules.len(),
            limit: ORACLE_LIMIT,
        });
    }
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << rules.len()) {
        if mask.count_ones() as usize > size_bound {
            continue;
        }
        let support: BTreeSet<RuleId> = rules
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &r)| r)
            .collect();
        let closure = theory.closure_with(&support);
        if !theory.index().consistent(&closure) {
            continue;
        }
        let without: Vec<_> = support
            .iter()
            .map(|&r| {
                let s: BTreeSet<RuleId> = support.iter().copied().filter(|&x| x != r).collect();
                theory.closure_with(&s)
            })
            .collect();
        for lit in closure.iter() {
            if without.iter().all(|c| !c.contains(lit)) {
                out.insert(ArgKey {
                    conclusion: lit,
                    support: support.clone(),
                });
            }
        }
    }
    Ok(out)
}
