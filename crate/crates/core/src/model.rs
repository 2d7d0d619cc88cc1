//! The decision model: acts with root states, binary chance expansions,
//! refinement, rollup and salient-path extraction.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{EngineError, ModelError};
use crate::logic::{sym, Atom, KnowledgeBase, Literal, PropFormula, Sym};
use crate::schemata::inherited_holds;
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Expansion {
    pub event: Sym,
    pub probability: Value,
    pub positive: Sym,
    pub negative: Sym,
}

/// Refinement models are values: every operation returns a new model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecisionModel {
    acts: Vec<Sym>,
    roots: BTreeMap<Sym, Sym>,
    states: Vec<Sym>,
    expansions: BTreeMap<Sym, Expansion>,
    parent: BTreeMap<Sym, Sym>,
}

impl DecisionModel {
    pub fn acts(&self) -> &[Sym] {
        &self.acts
    }

    /// `(act, root state)` pairs in act declaration order.
    pub fn roots(&self) -> Vec<(Sym, Sym)> {
        self.acts
            .iter()
            .filter_map(|a| self.roots.get(a).map(|s| (a.clone(), s.clone())))
            .collect()
    }

    pub fn root_of(&self, act: &str) -> Option<&Sym> {
        self.roots.get(act)
    }

    pub fn states(&self) -> &[Sym] {
        &self.states
    }

    pub fn has_state(&self, s: &str) -> bool {
        self.states.iter().any(|x| &**x == s)
    }

    pub fn expansion(&self, s: &str) -> Option<&Expansion> {
        self.expansions.get(s)
    }

    pub fn expansions(&self) -> impl Iterator<Item = (&Sym, &Expansion)> {
        self.expansions.iter()
    }

    pub fn parent(&self, s: &str) -> Option<&Sym> {
        self.parent.get(s)
    }

    pub fn children(&self, s: &str) -> Vec<Sym> {
        self.expansion(s)
            .map(|x| vec![x.positive.clone(), x.negative.clone()])
            .unwrap_or_default()
    }

    pub fn add_act(&mut self, act: Sym) -> Result<(), ModelError> {
        if self.acts.contains(&act) {
            return Err(ModelError::DuplicateState(act.to_string()));
        }
        self.acts.push(act);
        Ok(())
    }

    pub fn add_state(&mut self, s: Sym) -> Result<(), ModelError> {
        if self.has_state(&s) {
            return Err(ModelError::DuplicateState(s.to_string()));
        }
        self.states.push(s);
        Ok(())
    }

    pub fn set_root(&mut self, act: &Sym, state: &Sym) -> Result<(), ModelError> {
        if !self.acts.contains(act) {
            return Err(ModelError::UnknownAct(act.to_string()));
        }
        if !self.has_state(state) {
            return Err(ModelError::UnknownState(state.to_string()));
        }
        self.roots.insert(act.clone(), state.clone());
        Ok(())
    }

    fn ancestors(&self, s: &str) -> Vec<Sym> {
        let mut out = Vec::new();
        let mut cur = self.parent.get(s);
        while let Some(p) = cur {
            out.push(p.clone());
            cur = self.parent.get(p);
        }
        out
    }

    /// Splits `s` on `event`; children that are not yet states are created.
    pub fn expand(
        &self,
        s: &Sym,
        event: &Sym,
        k: Value,
        positive: Sym,
        negative: Sym,
    ) -> Result<DecisionModel, ModelError> {
        if !self.has_state(s) {
            return Err(ModelError::UnknownState(s.to_string()));
        }
        if self.expansions.contains_key(s) {
            return Err(ModelError::AlreadyExpanded(s.to_string()));
        }
        if !k.is_probability() {
            return Err(ModelError::Probability(k.to_string()));
        }
        let lineage: Vec<Sym> = self.ancestors(s);
        for child in [&positive, &negative] {
            if child == s || lineage.contains(child) || positive == negative {
                return Err(ModelError::Cycle(s.to_string()));
            }
            if let Some(p) = self.parent.get(child) {
                return Err(ModelError::SecondParent {
                    child: child.to_string(),
                    parent: p.to_string(),
                });
            }
        }
        let mut m = self.clone();
        for child in [&positive, &negative] {
            if !m.has_state(child) {
                m.states.push(child.clone());
            }
            m.parent.insert(child.clone(), s.clone());
        }
        m.expansions.insert(
            s.clone(),
            Expansion {
                event: event.clone(),
                probability: k,
                positive,
                negative,
            },
        );
        Ok(m)
    }

    /// Tree roots first, parents before children; every known state once.
    pub fn pre_order(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        for s in &self.states {
            if self.parent.contains_key(s) {
                continue;
            }
            let mut stack = vec![s.clone()];
            while let Some(x) = stack.pop() {
                let kids = self.children(&x);
                out.push(x);
                stack.extend(kids.into_iter().rev());
            }
        }
        out
    }

    /// Children before parents; `extra` states outside the model come last.
    pub fn post_order(&self, extra: &[Sym]) -> Vec<Sym> {
        let mut out: Vec<Sym> = self.pre_order();
        out.reverse();
        for s in extra {
            if !out.contains(s) {
                out.push(s.clone());
            }
        }
        out
    }

    /// States reachable from `s`, including `s`.
    pub fn subtree(&self, s: &str) -> Vec<Sym> {
        let mut out = Vec::new();
        let mut stack = vec![sym(s)];
        while let Some(x) = stack.pop() {
            stack.extend(self.children(&x));
            out.push(x);
        }
        out
    }

    /// Depth of `s` below its tree root.
    pub fn depth(&self, s: &str) -> usize {
        self.ancestors(s).len()
    }
}

/// What a refinement adds to the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refinement {
    Property(Sym),
    Assessment {
        state: Sym,
        basis: BTreeSet<Sym>,
        value: Value,
    },
}

/// Registers a new consideration. Returns fresh copies; the inputs are left
/// untouched so old and new recommendations can be compared.
pub fn refine_basis(
    m: &DecisionModel,
    kb: &KnowledgeBase,
    addition: Refinement,
) -> Result<(DecisionModel, KnowledgeBase), ModelError> {
    let mut kb2 = kb.clone();
    match addition {
        Refinement::Property(p) => {
            kb2.vocabulary.props.insert(p);
        }
        Refinement::Assessment {
            state,
            basis,
            value,
        } => {
            if basis.is_empty() {
                return Err(ModelError::EmptyBasis);
            }
            if !m.has_state(&state) && !kb.vocabulary.states.contains(&state) {
                return Err(ModelError::UnknownState(state.to_string()));
            }
            add_assessment(&mut kb2, state, basis, value)?;
        }
    }
    Ok((m.clone(), kb2))
}

/// Adds `u(state | basis) = value`; an identical assessment is a no-op, a
/// different value for the same basis is a conflict.
pub fn add_assessment(
    kb: &mut KnowledgeBase,
    state: Sym,
    basis: BTreeSet<Sym>,
    value: Value,
) -> Result<(), ModelError> {
    for lit in &kb.contingent {
        if let Atom::Assess {
            state: s,
            basis: b,
            value: v,
        } = &lit.atom
        {
            if *s == state && *b == basis && *v != value {
                let target = if basis.is_empty() {
                    format!("utility {state}")
                } else {
                    let names: Vec<&str> = basis.iter().map(|x| x.as_ref()).collect();
                    format!("u({state} | {})", names.join(", "))
                };
                return Err(ModelError::AssessmentConflict {
                    target,
                    existing: v.to_string(),
                    new: value.to_string(),
                });
            }
        }
    }
    for p in &basis {
        kb.vocabulary.props.insert(p.clone());
    }
    kb.contingent.insert(Literal::pos(Atom::Assess {
        state,
        basis,
        value,
    }));
    Ok(())
}

/// Splits `s` on `event` in a copy of the model and records the event.
pub fn expand_event(
    m: &DecisionModel,
    kb: &KnowledgeBase,
    s: &Sym,
    event: &Sym,
    k: Value,
    positive: Sym,
    negative: Sym,
) -> Result<(DecisionModel, KnowledgeBase), ModelError> {
    let m2 = m.expand(s, event, k, positive.clone(), negative.clone())?;
    let mut kb2 = kb.clone();
    kb2.vocabulary.events.insert(event.clone());
    kb2.vocabulary.states.insert(positive);
    kb2.vocabulary.states.insert(negative);
    Ok((m2, kb2))
}

/// Plain bottom-up expected-utility rollback, independent of the argument
/// engine. A leaf takes the assessment whose basis strictly contains every
/// other basis on that leaf.
pub fn rollup_oracle(
    m: &DecisionModel,
    kb: &KnowledgeBase,
) -> Result<BTreeMap<Sym, Value>, EngineError> {
    let mut sources: BTreeMap<Sym, Vec<(&BTreeSet<Sym>, &Value)>> = BTreeMap::new();
    for lit in &kb.contingent {
        if let (false, Atom::Assess { state, basis, value }) = (lit.negated, &lit.atom) {
            sources.entry(state.clone()).or_default().push((basis, value));
        }
    }
    let refuse = |s: &Sym, reason: &str| EngineError::Rollup {
        state: s.to_string(),
        reason: reason.to_string(),
    };
    let mut out: BTreeMap<Sym, Value> = BTreeMap::new();
    for s in m.post_order(&[]) {
        let value = match m.expansion(&s) {
            Some(x) => {
                let k = &x.probability;
                let rest = &Value::one() - k;
                &(k * &out[&x.positive]) + &(&rest * &out[&x.negative])
            }
            None => {
                let cands = sources.get(&s).ok_or_else(|| refuse(&s, "no utility source"))?;
                let top = cands
                    .iter()
                    .find(|(b, _)| {
                        cands
                            .iter()
                            .all(|(c, _)| c == b || (c.is_subset(b) && c.len() < b.len()))
                    })
                    .ok_or_else(|| refuse(&s, "ambiguous utility sources"))?;
                let rivals = cands.iter().filter(|(b, _)| b == &top.0).count();
                if rivals > 1 {
                    return Err(refuse(&s, "ambiguous utility sources"));
                }
                top.1.clone()
            }
        };
        out.insert(s, value);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SalientPath {
    pub act: Sym,
    /// States from the act's root down to the salient state.
    pub states: Vec<Sym>,
    /// Probability of reaching the last state from the root.
    pub mass: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SalientModel {
    pub model: DecisionModel,
    pub salient: Vec<Sym>,
    pub paths: Vec<SalientPath>,
    /// Probability mass per act covered by the salient states kept.
    pub coverage: BTreeMap<Sym, Value>,
    pub notice: Option<String>,
}

/// States whose assessment, or some contribution of a formula holding
/// there, reaches `threshold` in absolute value.
pub fn salient_states(m: &DecisionModel, kb: &KnowledgeBase, threshold: &Value) -> Vec<Sym> {
    let mut atoms_at: BTreeMap<Sym, BTreeSet<Sym>> = BTreeMap::new();
    for lit in kb.contingent.iter().chain(inherited_holds(kb, m).iter()) {
        if let (false, Atom::Holds { formula, state }) = (lit.negated, &lit.atom) {
            if !formula.negated() {
                atoms_at
                    .entry(state.clone())
                    .or_default()
                    .extend(formula.atoms().iter().cloned());
            }
        }
    }
    let big_entries: Vec<&PropFormula> = kb
        .necessary
        .iter()
        .filter_map(|l| match &l.atom {
            Atom::ContrEntry { formula, value } if value.abs() >= *threshold => Some(formula),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    for s in m.pre_order() {
        let assessed = kb.contingent.iter().any(|l| {
            matches!(&l.atom, Atom::Assess { state, value, .. } if *state == s && value.abs() >= *threshold)
        });
        let contributed = atoms_at.get(&s).is_some_and(|atoms| {
            big_entries
                .iter()
                .any(|f| !f.negated() && f.atoms().iter().all(|a| atoms.contains(a)))
        });
        if assessed || contributed {
            out.push(s);
        }
    }
    out
}

/// Backward chaining from salient states to act roots, treating every event
/// as if it could be chosen. Each path keeps at most `depth` expansions; the
/// paths are merged into one model where off-path siblings stay as leaves.
pub fn salient_paths(
    m: &DecisionModel,
    kb: &KnowledgeBase,
    threshold: &Value,
    depth: usize,
) -> Result<SalientModel, ModelError> {
    if !threshold.is_positive() {
        return Err(ModelError::Threshold);
    }
    let unchanged = |notice: &str| SalientModel {
        model: m.clone(),
        salient: Vec::new(),
        paths: Vec::new(),
        coverage: BTreeMap::new(),
        notice: Some(notice.to_string()),
    };
    let salient = salient_states(m, kb, threshold);
    if salient.is_empty() {
        return Ok(unchanged("no salient states at this threshold; model unchanged"));
    }
    let mut paths = Vec::new();
    for target in &salient {
        let mut chain = vec![target.clone()];
        chain.extend(m.ancestors(target));
        chain.reverse();
        if chain.len() - 1 > depth {
            continue;
        }
        for (act, root) in m.roots() {
            if root != chain[0] {
                continue;
            }
            let mut mass = Value::one();
            for pair in chain.windows(2) {
                let x = m.expansion(&pair[0]).expect("parent is expanded");
                mass = if x.positive == pair[1] {
                    &mass * &x.probability
                } else {
                    &mass * &(&Value::one() - &x.probability)
                };
            }
            paths.push(SalientPath {
                act,
                states: chain.clone(),
                mass,
            });
        }
    }
    if paths.is_empty() {
        return Ok(unchanged(
            "no salient state is reachable from an act within the depth bound; model unchanged",
        ));
    }
    let kept: BTreeSet<Sym> = paths.iter().flat_map(|p| p.states.iter().cloned()).collect();
    let mut model = DecisionModel::default();
    for (act, root) in m.roots() {
        if paths.iter().any(|p| p.act == act) {
            model.acts.push(act.clone());
            model.roots.insert(act, root);
        }
    }
    for s in m.pre_order() {
        let on_path = kept.contains(&s);
        let sibling = m.parent(&s).is_some_and(|p| kept.contains(p));
        if !(on_path || sibling) {
            continue;
        }
        model.states.push(s.clone());
        if let Some(p) = m.parent(&s) {
            if kept.contains(p) {
                model.parent.insert(s.clone(), p.clone());
            }
        }
        if on_path {
            if let Some(x) = m.expansion(&s) {
                if kept.contains(&x.positive) || kept.contains(&x.negative) {
                    model.expansions.insert(s.clone(), x.clone());
                }
            }
        }
    }
    let mut coverage: BTreeMap<Sym, Value> = BTreeMap::new();
    for p in &paths {
        let last = p.states.last().expect("non-empty path");
        let nested = paths.iter().any(|q| {
            q.act == p.act && q.states.len() < p.states.len() && p.states.starts_with(&q.states)
                && q.states.last() != Some(last)
        });
        if !nested {
            let c = coverage.entry(p.act.clone()).or_insert_with(Value::zero);
            *c = &*c + &p.mass;
        }
    }
    Ok(SalientModel {
        model,
        salient,
        paths,
        coverage,
        notice: None,
    })
}
