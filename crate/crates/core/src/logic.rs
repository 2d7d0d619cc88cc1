//! Ground literals, conjunctive property formulas, rules, and strict closure.
//!
//! Numeric claims (`u(s) = v`, `contr(F) = v`, `prob(E, s) = k`) are functional:
//! two claims on the same key with different values are inconsistent even though
//! neither is the syntactic negation of the other.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::value::Value;

pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("malformed formula: a conjunction needs at least one atom")]
    EmptyFormula,
    #[error("malformed act term: needs at least one act")]
    EmptyActTerm,
    #[error("variable `{var}` is used both as {first} and as {second} in rule `{rule}`")]
    VariableSort {
        rule: String,
        var: String,
        first: &'static str,
        second: &'static str,
    },
    #[error("rule `{rule}` has {count} ground instances (limit {limit})")]
    TooManyInstances {
        rule: String,
        count: usize,
        limit: usize,
    },
    #[error("{kind} facts belong to necessary knowledge and cannot be contingent evidence: `{literal}`")]
    NecessaryAsContingent { kind: &'static str, literal: String },
}

/// A conjunction of property atoms, optionally negated as a whole.
///
/// Atoms are kept sorted and duplicate-free, so `P & Q`, `Q & P` and
/// `Q & P & Q` are the same value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropFormula {
    atoms: Vec<Sym>,
    negated: bool,
}

/// Canonicalizes a conjunction: sorts and deduplicates the atoms.
pub fn conj_normalize<I, S>(atoms: I, negated: bool) -> Result<PropFormula, LogicError>
where
    I: IntoIterator<Item = S>,
    S: Into<Sym>,
{
    let set: BTreeSet<Sym> = atoms.into_iter().map(Into::into).collect();
    if set.is_empty() {
        return Err(LogicError::EmptyFormula);
    }
    Ok(PropFormula {
        atoms: set.into_iter().collect(),
        negated,
    })
}

impl PropFormula {
    pub fn atom(name: &str) -> Self {
        PropFormula {
            atoms: vec![sym(name)],
            negated: false,
        }
    }

    /// Positive conjunction of the given atoms. Panics on an empty list.
    pub fn conj(names: &[&str]) -> Self {
        conj_normalize(names.iter().map(|n| sym(n)), false).expect("non-empty conjunction")
    }

    pub fn atoms(&self) -> &[Sym] {
        &self.atoms
    }

    pub fn negated(&self) -> bool {
        self.negated
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn negate(&self) -> Self {
        PropFormula {
            atoms: self.atoms.clone(),
            negated: !self.negated,
        }
    }

    /// Positive formulas only: every atom of `other` occurs in `self`.
    pub fn includes(&self, other: &PropFormula) -> bool {
        !self.negated
            && !other.negated
            && other.atoms.iter().all(|a| self.atoms.binary_search(a).is_ok())
    }

    pub fn with_atom(&self, atom: &Sym) -> Self {
        conj_normalize(self.atoms.iter().cloned().chain([atom.clone()]), self.negated)
            .expect("non-empty")
    }

    /// All non-empty sub-conjunctions (positive formulas only).
    pub fn subformulas(&self) -> Vec<PropFormula> {
        let n = self.atoms.len();
        (1u32..(1 << n))
            .map(|mask| PropFormula {
                atoms: (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.atoms[i].clone())
                    .collect(),
                negated: false,
            })
            .collect()
    }

    /// Unordered binary partitions `{G, F \ G}` with both parts non-empty.
    pub fn binary_partitions(&self) -> Vec<(PropFormula, PropFormula)> {
        let n = self.atoms.len();
        if n < 2 {
            return Vec::new();
        }
        let full = (1u32 << n) - 1;
        let mut out = Vec::new();
        // Fix the first atom on the left side so each split appears once.
        for mask in 1..full {
            if mask & 1 == 0 {
                continue;
            }
            let pick = |m: u32| PropFormula {
                atoms: (0..n)
                    .filter(|i| m & (1 << i) != 0)
                    .map(|i| self.atoms[i].clone())
                    .collect(),
                negated: false,
            };
            out.push((pick(mask), pick(full & !mask)));
        }
        out
    }

    fn map_atoms(&self, f: &impl Fn(&Sym) -> Sym) -> PropFormula {
        conj_normalize(self.atoms.iter().map(f), self.negated).expect("non-empty")
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = self
            .atoms
            .iter()
            .map(|a| a.as_ref())
            .collect::<Vec<_>>()
            .join(" & ");
        match (self.negated, self.atoms.len()) {
            (false, _) => f.write_str(&body),
            (true, 1) => write!(f, "~{body}"),
            (true, _) => write!(f, "~({body})"),
        }
    }
}

impl fmt::Debug for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// An act or a joint act (`a1 & a2`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActTerm(Vec<Sym>);

impl ActTerm {
    pub fn new<I, S>(acts: I) -> Result<Self, LogicError>
    where
        I: IntoIterator<Item = S>,
        S: Into<Sym>,
    {
        let set: BTreeSet<Sym> = acts.into_iter().map(Into::into).collect();
        if set.is_empty() {
            return Err(LogicError::EmptyActTerm);
        }
        Ok(ActTerm(set.into_iter().collect()))
    }

    pub fn single(name: &str) -> Self {
        ActTerm(vec![sym(name)])
    }

    pub fn acts(&self) -> &[Sym] {
        &self.0
    }

    pub fn is_joint(&self) -> bool {
        self.0.len() > 1
    }

    fn map_acts(&self, f: &impl Fn(&Sym) -> Sym) -> ActTerm {
        ActTerm::new(self.0.iter().map(f)).expect("non-empty")
    }
}

impl fmt::Display for ActTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(|a| a.as_ref()).collect();
        f.write_str(&parts.join(" & "))
    }
}

impl fmt::Debug for ActTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `holds(F, s)`: property formula F is true in state s.
    Holds { formula: PropFormula, state: Sym },
    Achieves { act: ActTerm, formula: PropFormula },
    Desir(PropFormula),
    Undesir(PropFormula),
    Do(ActTerm),
    /// A claimed contribution, concluded by arguments.
    Contr { formula: PropFormula, value: Value },
    /// A stated row of the contribution table (necessary knowledge).
    ContrEntry { formula: PropFormula, value: Value },
    /// `u(s) = v`
    Utility { state: Sym, value: Value },
    /// A direct valuation of `state` based on the listed properties. An empty
    /// basis is a bare `utility s = v` statement.
    Assess {
        state: Sym,
        basis: BTreeSet<Sym>,
        value: Value,
    },
    Prob { event: Sym, state: Sym, value: Value },
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

/// Functional-dependency key of a numeric claim.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FdKey {
    Utility(Sym),
    Contr(PropFormula),
    ContrEntry(PropFormula),
    Prob(Sym, Sym),
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            atom,
            negated: false,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            atom,
            negated: true,
        }
    }

    pub fn negate(&self) -> Self {
        Literal {
            atom: self.atom.clone(),
            negated: !self.negated,
        }
    }

    pub fn holds(formula: PropFormula, state: &str) -> Self {
        Literal::pos(Atom::Holds {
            formula,
            state: sym(state),
        })
    }

    pub fn utility(state: &str, value: Value) -> Self {
        Literal::pos(Atom::Utility {
            state: sym(state),
            value,
        })
    }

    pub fn contr(formula: PropFormula, value: Value) -> Self {
        Literal::pos(Atom::Contr { formula, value })
    }

    pub fn do_act(act: &str) -> Self {
        Literal::pos(Atom::Do(ActTerm::single(act)))
    }

    pub fn not_do(act: &str) -> Self {
        Literal::neg(Atom::Do(ActTerm::single(act)))
    }

    pub fn fd_key(&self) -> Option<(FdKey, &Value)> {
        if self.negated {
            return None;
        }
        match &self.atom {
            Atom::Utility { state, value } => Some((FdKey::Utility(state.clone()), value)),
            Atom::Contr { formula, value } => Some((FdKey::Contr(formula.clone()), value)),
            Atom::ContrEntry { formula, value } => {
                Some((FdKey::ContrEntry(formula.clone()), value))
            }
            Atom::Prob {
                event,
                state,
                value,
            } => Some((FdKey::Prob(event.clone(), state.clone()), value)),
            _ => None,
        }
    }

    /// Kinds that are always necessary knowledge.
    pub fn is_necessary_kind(&self) -> bool {
        matches!(self.atom, Atom::ContrEntry { .. } | Atom::Prob { .. })
    }

    pub fn value(&self) -> Option<&Value> {
        match &self.atom {
            Atom::Contr { value, .. }
            | Atom::ContrEntry { value, .. }
            | Atom::Utility { value, .. }
            | Atom::Assess { value, .. }
            | Atom::Prob { value, .. } => Some(value),
            _ => None,
        }
    }

    /// Positive, non-negated formulas mentioned by this literal.
    pub fn formulas(&self) -> Vec<&PropFormula> {
        match &self.atom {
            Atom::Holds { formula, .. }
            | Atom::Achieves { formula, .. }
            | Atom::Desir(formula)
            | Atom::Undesir(formula)
            | Atom::Contr { formula, .. }
            | Atom::ContrEntry { formula, .. } => vec![formula],
            _ => Vec::new(),
        }
    }

    /// Replaces symbols throughout (used by rule grounding).
    pub fn rename(&self, f: &impl Fn(&Sym) -> Sym) -> Literal {
        let atom = match &self.atom {
            Atom::Holds { formula, state } => Atom::Holds {
                formula: formula.map_atoms(f),
                state: f(state),
            },
            Atom::Achieves { act, formula } => Atom::Achieves {
                act: act.map_acts(f),
                formula: formula.map_atoms(f),
            },
            Atom::Desir(x) => Atom::Desir(x.map_atoms(f)),
            Atom::Undesir(x) => Atom::Undesir(x.map_atoms(f)),
            Atom::Do(a) => Atom::Do(a.map_acts(f)),
            Atom::Contr { formula, value } => Atom::Contr {
                formula: formula.map_atoms(f),
                value: value.clone(),
            },
            Atom::ContrEntry { formula, value } => Atom::ContrEntry {
                formula: formula.map_atoms(f),
                value: value.clone(),
            },
            Atom::Utility { state, value } => Atom::Utility {
                state: f(state),
                value: value.clone(),
            },
            Atom::Assess {
                state,
                basis,
                value,
            } => Atom::Assess {
                state: f(state),
                basis: basis.iter().map(f).collect(),
                value: value.clone(),
            },
            Atom::Prob {
                event,
                state,
                value,
            } => Atom::Prob {
                event: f(event),
                state: f(state),
                value: value.clone(),
            },
        };
        Literal {
            atom,
            negated: self.negated,
        }
    }

    /// Every symbol occurrence with the sort its position requires.
    pub fn symbols(&self) -> Vec<(Sort, Sym)> {
        let mut out = Vec::new();
        let props = |out: &mut Vec<(Sort, Sym)>, f: &PropFormula| {
            out.extend(f.atoms().iter().map(|a| (Sort::Prop, a.clone())))
        };
        match &self.atom {
            Atom::Holds { formula, state } => {
                props(&mut out, formula);
                out.push((Sort::State, state.clone()));
            }
            Atom::Achieves { act, formula } => {
                out.extend(act.acts().iter().map(|a| (Sort::Act, a.clone())));
                props(&mut out, formula);
            }
            Atom::Desir(x) | Atom::Undesir(x) => props(&mut out, x),
            Atom::Do(a) => out.extend(a.acts().iter().map(|a| (Sort::Act, a.clone()))),
            Atom::Contr { formula, .. } | Atom::ContrEntry { formula, .. } => {
                props(&mut out, formula)
            }
            Atom::Utility { state, .. } => out.push((Sort::State, state.clone())),
            Atom::Assess { state, basis, .. } => {
                out.push((Sort::State, state.clone()));
                out.extend(basis.iter().map(|b| (Sort::Prop, b.clone())));
            }
            Atom::Prob { event, state, .. } => {
                out.push((Sort::Prop, event.clone()));
                out.push((Sort::State, state.clone()));
            }
        }
        out
    }
}

/// True when the two literals cannot both hold.
pub fn clash(a: &Literal, b: &Literal) -> bool {
    if a.atom == b.atom && a.negated != b.negated {
        return true;
    }
    if let (Some((ka, va)), Some((kb, vb))) = (a.fd_key(), b.fd_key()) {
        return ka == kb && va != vb;
    }
    if a.negated || b.negated {
        return false;
    }
    matches!(
        (&a.atom, &b.atom),
        (Atom::Desir(x), Atom::Undesir(y)) | (Atom::Undesir(x), Atom::Desir(y)) if x == y
    )
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Holds { formula, state } => write!(f, "holds({formula}, {state})"),
            Atom::Achieves { act, formula } => write!(f, "achieves({act}, {formula})"),
            Atom::Desir(x) => write!(f, "desir({x})"),
            Atom::Undesir(x) => write!(f, "undesir({x})"),
            Atom::Do(a) => write!(f, "do({a})"),
            Atom::Contr { formula, value } => write!(f, "contr({formula}) = {value}"),
            Atom::ContrEntry { formula, value } => write!(f, "entry contr({formula}) = {value}"),
            Atom::Utility { state, value } => write!(f, "u({state}) = {value}"),
            Atom::Assess {
                state,
                basis,
                value,
            } => {
                let b: Vec<&str> = basis.iter().map(|s| s.as_ref()).collect();
                if b.is_empty() {
                    write!(f, "u({state} |) = {value}")
                } else {
                    write!(f, "u({state} | {}) = {value}", b.join(", "))
                }
            }
            Atom::Prob {
                event,
                state,
                value,
            } => write!(f, "prob({event}, {state}) = {value}"),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~{}", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Prop,
    Act,
    State,
}

impl Sort {
    fn name(self) -> &'static str {
        match self {
            Sort::Prop => "a property",
            Sort::Act => "an act",
            Sort::State => "a state",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strength {
    Strict,
    Defeasible,
}

/// Which built-in schema produced a rule instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Schema {
    ConjIntro,
    ConjElim,
    /// A contribution-table row asserted as a claim.
    Entry,
    /// `contr(G) = x & contr(H) = y => contr(G & H) = x + y`
    Additive,
    /// `holds(F, s) & contr(F) = v => u(s) = v`
    StateProperty,
    /// `u(s | basis) = v => u(s) = v`
    Assessment,
    /// Probability-weighted combination of the children of an expansion.
    ExpectedUtility { event: Sym },
    /// `u(root a) > u(root b) => do(a)`
    Prefer { act: Sym, rival: Sym },
    /// `u(root a) < u(root b) => ~do(a)`
    Reject { act: Sym, rival: Sym },
    Achieve,
    Avoid,
    Compose,
}

impl Schema {
    pub fn tag(&self) -> &'static str {
        match self {
            Schema::ConjIntro => "conj-intro",
            Schema::ConjElim => "conj-elim",
            Schema::Entry => "entry",
            Schema::Additive => "additive",
            Schema::StateProperty => "state-property",
            Schema::Assessment => "assessment",
            Schema::ExpectedUtility { .. } => "expected-utility",
            Schema::Prefer { .. } => "prefer",
            Schema::Reject { .. } => "reject",
            Schema::Achieve => "achieve",
            Schema::Avoid => "avoid",
            Schema::Compose => "compose",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    User(String),
    Schema(Schema),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub name: String,
    pub body: Vec<Literal>,
    pub head: Literal,
    pub strength: Strength,
    pub origin: Origin,
}

impl Rule {
    pub fn new(
        name: impl Into<String>,
        body: impl IntoIterator<Item = Literal>,
        head: Literal,
        strength: Strength,
        origin: Origin,
    ) -> Self {
        let body: BTreeSet<Literal> = body.into_iter().collect();
        Rule {
            name: name.into(),
            body: body.into_iter().collect(),
            head,
            strength,
            origin,
        }
    }

    pub fn is_strict(&self) -> bool {
        self.strength == Strength::Strict
    }

    pub fn schema(&self) -> Option<&Schema> {
        match &self.origin {
            Origin::Schema(s) => Some(s),
            Origin::User(_) => None,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.body.iter().map(|l| l.to_string()).collect();
        let arrow = if self.is_strict() { "->" } else { "=>" };
        write!(
            f,
            "{}: {} {arrow} {}",
            self.name,
            body.join(", "),
            self.head
        )
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Declared identifiers. Events are properties introduced by chance nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub props: BTreeSet<Sym>,
    pub acts: BTreeSet<Sym>,
    pub states: BTreeSet<Sym>,
    pub events: BTreeSet<Sym>,
}

impl Vocabulary {
    pub fn declares(&self, s: &str) -> bool {
        self.props.contains(s)
            || self.acts.contains(s)
            || self.states.contains(s)
            || self.events.contains(s)
    }

    pub fn is_property(&self, s: &str) -> bool {
        self.props.contains(s) || self.events.contains(s)
    }

    /// Rule variables are uppercase identifiers that name nothing declared.
    pub fn is_variable(&self, s: &str) -> bool {
        s.chars().next().is_some_and(|c| c.is_ascii_uppercase()) && !self.declares(s)
    }

    fn domain(&self, sort: Sort) -> Vec<Sym> {
        match sort {
            Sort::Prop => self.props.union(&self.events).cloned().collect(),
            Sort::Act => self.acts.iter().cloned().collect(),
            Sort::State => self.states.iter().cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub vocabulary: Vocabulary,
    pub necessary: BTreeSet<Literal>,
    pub contingent: BTreeSet<Literal>,
    pub strict_rules: Vec<Rule>,
    pub defeasible_rules: Vec<Rule>,
}

impl KnowledgeBase {
    /// Files the literal as necessary or contingent by its kind.
    pub fn add_fact(&mut self, lit: Literal) {
        if lit.is_necessary_kind() {
            self.necessary.insert(lit);
        } else {
            self.contingent.insert(lit);
        }
    }

    /// Contingent evidence supplied by a user. Contribution and probability
    /// facts are refused: they are necessary knowledge.
    pub fn add_contingent(&mut self, lit: Literal) -> Result<(), LogicError> {
        let kind = match lit.atom {
            Atom::Contr { .. } | Atom::ContrEntry { .. } => Some("contribution"),
            Atom::Prob { .. } => Some("probability"),
            _ => None,
        };
        if let Some(kind) = kind {
            return Err(LogicError::NecessaryAsContingent {
                kind,
                literal: lit.to_string(),
            });
        }
        self.contingent.insert(lit);
        Ok(())
    }

    pub fn evidence(&self) -> impl Iterator<Item = &Literal> {
        self.necessary.iter().chain(self.contingent.iter())
    }

    pub fn add_rule(&mut self, rule: Rule) {
        match rule.strength {
            Strength::Strict => self.strict_rules.push(rule),
            Strength::Defeasible => self.defeasible_rules.push(rule),
        }
    }

    /// All ground instances of the user rules.
    pub fn ground_rules(&self, limit: usize) -> Result<Vec<Rule>, LogicError> {
        let mut out = Vec::new();
        for r in self.strict_rules.iter().chain(&self.defeasible_rules) {
            out.extend(ground_rule(r, &self.vocabulary, limit)?);
        }
        Ok(out)
    }
}

/// Instantiates the variables of `rule` over the declared vocabulary.
pub fn ground_rule(rule: &Rule, vocab: &Vocabulary, limit: usize) -> Result<Vec<Rule>, LogicError> {
    let mut sorts: BTreeMap<Sym, Sort> = BTreeMap::new();
    for lit in rule.body.iter().chain([&rule.head]) {
        for (sort, s) in lit.symbols() {
            if !vocab.is_variable(&s) {
                continue;
            }
            match sorts.get(&s) {
                Some(prev) if *prev != sort => {
                    return Err(LogicError::VariableSort {
                        rule: rule.name.clone(),
                        var: s.to_string(),
                        first: prev.name(),
                        second: sort.name(),
                    })
                }
                _ => {
                    sorts.insert(s, sort);
                }
            }
        }
    }
    if sorts.is_empty() {
        return Ok(vec![rule.clone()]);
    }
    let vars: Vec<(Sym, Vec<Sym>)> = sorts
        .into_iter()
        .map(|(v, sort)| (v, vocab.domain(sort)))
        .collect();
    let count = vars
        .iter()
        .try_fold(1usize, |acc, (_, d)| acc.checked_mul(d.len()))
        .unwrap_or(usize::MAX);
    if count > limit {
        return Err(LogicError::TooManyInstances {
            rule: rule.name.clone(),
            count,
            limit,
        });
    }
    let mut out = Vec::with_capacity(count);
    let mut choice = vec![0usize; vars.len()];
    if vars.iter().any(|(_, d)| d.is_empty()) {
        return Ok(out);
    }
    loop {
        let binding: HashMap<&Sym, &Sym> = vars
            .iter()
            .zip(&choice)
            .map(|((v, d), &i)| (v, &d[i]))
            .collect();
        let subst = |s: &Sym| binding.get(s).map(|x| (*x).clone()).unwrap_or_else(|| s.clone());
        let label: Vec<String> = vars
            .iter()
            .zip(&choice)
            .map(|((v, d), &i)| format!("{v}={}", d[i]))
            .collect();
        out.push(Rule::new(
            format!("{}{{{}}}", rule.name, label.join(",")),
            rule.body.iter().map(|l| l.rename(&subst)),
            rule.head.rename(&subst),
            rule.strength,
            rule.origin.clone(),
        ));
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(out);
            }
            choice[i] += 1;
            if choice[i] < vars[i].1.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Holds-subject of a formula-carrying literal, used for conjunction rules.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bearer {
    State(Sym),
    Act(ActTerm),
}

impl Bearer {
    fn of(lit: &Literal) -> Option<(Bearer, &PropFormula)> {
        if lit.negated {
            return None;
        }
        match &lit.atom {
            Atom::Holds { formula, state } if !formula.negated() => {
                Some((Bearer::State(state.clone()), formula))
            }
            Atom::Achieves { act, formula } if !formula.negated() => {
                Some((Bearer::Act(act.clone()), formula))
            }
            _ => None,
        }
    }

    fn literal(&self, formula: PropFormula) -> Literal {
        match self {
            Bearer::State(s) => Literal::pos(Atom::Holds {
                formula,
                state: s.clone(),
            }),
            Bearer::Act(a) => Literal::pos(Atom::Achieves {
                act: a.clone(),
                formula,
            }),
        }
    }
}

/// Strict conjunction introduction and elimination for `holds` and
/// `achieves` literals, restricted to the given formula universe.
///
/// `mentioned` are all literals that may ever be derived or queried; they
/// decide which bearers and atoms are in play.
pub fn conjunction_rules<'a>(
    mentioned: impl IntoIterator<Item = &'a Literal>,
    universe: &BTreeSet<PropFormula>,
) -> Vec<Rule> {
    let mut atoms_of: BTreeMap<Bearer, BTreeSet<Sym>> = BTreeMap::new();
    let mut carried: BTreeMap<Bearer, BTreeSet<PropFormula>> = BTreeMap::new();
    for lit in mentioned {
        if let Some((bearer, f)) = Bearer::of(lit) {
            atoms_of
                .entry(bearer.clone())
                .or_default()
                .extend(f.atoms().iter().cloned());
            carried.entry(bearer).or_default().insert(f.clone());
        }
    }
    let mut out = Vec::new();
    for (bearer, atoms) in &atoms_of {
        for f in &carried[bearer] {
            if f.len() < 2 {
                continue;
            }
            for a in f.atoms() {
                out.push(Rule::new(
                    "conj-elim",
                    [bearer.literal(f.clone())],
                    bearer.literal(PropFormula::atom(a)),
                    Strength::Strict,
                    Origin::Schema(Schema::ConjElim),
                ));
            }
        }
        for f in universe {
            if f.len() < 2 || f.negated() || !f.atoms().iter().all(|a| atoms.contains(a)) {
                continue;
            }
            out.push(Rule::new(
                "conj-intro",
                f.atoms().iter().map(|a| bearer.literal(PropFormula::atom(a))),
                bearer.literal(f.clone()),
                Strength::Strict,
                Origin::Schema(Schema::ConjIntro),
            ));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Interned literal id inside a [`RuleIndex`].
pub type LitId = usize;
pub type RuleId = usize;

/// Dense set of literal ids.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct LitSet {
    words: Vec<u64>,
}

impl LitSet {
    pub fn with_capacity(n: usize) -> Self {
        LitSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn insert(&mut self, id: LitId) -> bool {
        let (w, b) = (id / 64, id % 64);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, id: LitId) -> bool {
        let (w, b) = (id / 64, id % 64);
        w < self.words.len() && self.words[w] & (1 << b) != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = LitId> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits & (1 << b) != 0).map(move |b| w * 64 + b)
        })
    }

    pub fn is_subset(&self, other: &LitSet) -> bool {
        self.words.iter().enumerate().all(|(i, &w)| {
            let o = other.words.get(i).copied().unwrap_or(0);
            w & !o == 0
        })
    }
}

struct IndexedRule {
    body: Vec<LitId>,
    head: LitId,
    strict: bool,
}

/// Interned literals and ground rules with forward-chaining closure.
#[derive(Default)]
pub struct RuleIndex {
    lits: Vec<Literal>,
    ids: HashMap<Literal, LitId>,
    rules: Vec<Rule>,
    indexed: Vec<IndexedRule>,
    by_body: Vec<Vec<RuleId>>,
    by_head: Vec<Vec<RuleId>>,
    bodiless: Vec<RuleId>,
    clashes: Vec<Vec<LitId>>,
    fd_groups: HashMap<FdKey, Vec<LitId>>,
}

impl RuleIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, lit: &Literal) -> LitId {
        if let Some(&id) = self.ids.get(lit) {
            return id;
        }
        let id = self.lits.len();
        self.lits.push(lit.clone());
        self.ids.insert(lit.clone(), id);
        self.by_body.push(Vec::new());
        self.by_head.push(Vec::new());
        self.clashes.push(Vec::new());
        // Maintain the clash lists incrementally.
        let neg = lit.negate();
        if let Some(&other) = self.ids.get(&neg) {
            self.clashes[id].push(other);
            self.clashes[other].push(id);
        }
        if let Some((key, value)) = lit.fd_key() {
            let group = self.fd_groups.entry(key).or_default();
            for &other in group.iter() {
                if self.lits[other].value() != Some(value) {
                    self.clashes[id].push(other);
                    self.clashes[other].push(id);
                }
            }
            group.push(id);
        }
        if !lit.negated {
            let dual = match &lit.atom {
                Atom::Desir(f) => Some(Literal::pos(Atom::Undesir(f.clone()))),
                Atom::Undesir(f) => Some(Literal::pos(Atom::Desir(f.clone()))),
                _ => None,
            };
            if let Some(&other) = dual.as_ref().and_then(|d| self.ids.get(d)) {
                self.clashes[id].push(other);
                self.clashes[other].push(id);
            }
        }
        id
    }

    pub fn add_rule(&mut self, rule: Rule) -> RuleId {
        let id = self.rules.len();
        let body: Vec<LitId> = rule.body.iter().map(|l| self.intern(l)).collect();
        let head = self.intern(&rule.head);
        for &b in &body {
            self.by_body[b].push(id);
        }
        if body.is_empty() {
            self.bodiless.push(id);
        }
        self.by_head[head].push(id);
        self.indexed.push(IndexedRule {
            body,
            head,
            strict: rule.is_strict(),
        });
        self.rules.push(rule);
        id
    }

    pub fn lookup(&self, lit: &Literal) -> Option<LitId> {
        self.ids.get(lit).copied()
    }

    pub fn literal(&self, id: LitId) -> &Literal {
        &self.lits[id]
    }

    pub fn literal_count(&self) -> usize {
        self.lits.len()
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        &self.rules[id]
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule_body(&self, id: RuleId) -> &[LitId] {
        &self.indexed[id].body
    }

    pub fn rule_head(&self, id: RuleId) -> LitId {
        self.indexed[id].head
    }

    pub fn is_strict(&self, id: RuleId) -> bool {
        self.indexed[id].strict
    }

    pub fn rules_for(&self, head: LitId) -> &[RuleId] {
        &self.by_head[head]
    }

    /// Interned literals that cannot hold together with `id`.
    pub fn clashes_with(&self, id: LitId) -> &[LitId] {
        &self.clashes[id]
    }

    /// Forward closure of `seeds` under strict rules plus the defeasible rules
    /// accepted by `enabled` (treated as if strict).
    pub fn closure(
        &self,
        seeds: impl IntoIterator<Item = LitId>,
        enabled: &dyn Fn(RuleId) -> bool,
    ) -> LitSet {
        let mut set = LitSet::with_capacity(self.lits.len());
        let mut queue: Vec<LitId> = Vec::new();
        let mut remaining: HashMap<RuleId, usize> = HashMap::new();
        let allowed = |r: RuleId| self.indexed[r].strict || enabled(r);
        for s in seeds {
            if set.insert(s) {
                queue.push(s);
            }
        }
        for &r in &self.bodiless {
            if allowed(r) {
                let h = self.indexed[r].head;
                if set.insert(h) {
                    queue.push(h);
                }
            }
        }
        while let Some(lit) = queue.pop() {
            for &r in &self.by_body[lit] {
                if !allowed(r) {
                    continue;
                }
                let left = remaining
                    .entry(r)
                    .or_insert_with(|| self.indexed[r].body.len());
                *left -= 1;
                if *left == 0 {
                    let h = self.indexed[r].head;
                    if set.insert(h) {
                        queue.push(h);
                    }
                }
            }
        }
        set
    }

    pub fn consistent(&self, set: &LitSet) -> bool {
        set.iter()
            .all(|id| self.clashes[id].iter().all(|&other| !set.contains(other)))
    }
}

/// Query target for [`entails`]: a literal, or falsum (inconsistency).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    Literal(Literal),
    Bottom,
}

fn strict_index<'a>(
    kb: &KnowledgeBase,
    extra: impl IntoIterator<Item = &'a Literal>,
) -> Result<RuleIndex, LogicError> {
    let strict: Vec<Rule> = kb
        .strict_rules
        .iter()
        .map(|r| ground_rule(r, &kb.vocabulary, 100_000))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let extra: Vec<&Literal> = extra.into_iter().collect();
    let mentioned: Vec<&Literal> = kb
        .evidence()
        .chain(extra.iter().copied())
        .chain(strict.iter().flat_map(|r| r.body.iter().chain([&r.head])))
        .collect();
    let universe: BTreeSet<PropFormula> = mentioned
        .iter()
        .flat_map(|l| l.formulas())
        .filter(|f| !f.negated())
        .flat_map(|f| {
            let mut v = vec![f.clone()];
            v.extend(f.atoms().iter().map(|a| PropFormula::atom(a)));
            v
        })
        .collect();
    let mut index = RuleIndex::new();
    for r in conjunction_rules(mentioned.iter().copied(), &universe) {
        index.add_rule(r);
    }
    for r in strict {
        index.add_rule(r);
    }
    for l in extra {
        index.intern(l);
    }
    Ok(index)
}

/// Strict consequence: `goal` is in the closure of `kb`'s necessary knowledge
/// and `facts` under strict rules and conjunction reasoning, or (for
/// [`Goal::Bottom`]) that closure is inconsistent.
pub fn entails(kb: &KnowledgeBase, facts: &BTreeSet<Literal>, goal: &Goal) -> Result<bool, LogicError> {
    let goal_lit = match goal {
        Goal::Literal(l) => Some(l),
        Goal::Bottom => None,
    };
    let index = strict_index(kb, facts.iter().chain(goal_lit))?;
    let mut index = index;
    let seeds: Vec<LitId> = kb
        .necessary
        .iter()
        .chain(facts.iter())
        .map(|l| index.intern(l))
        .collect();
    let closure = index.closure(seeds, &|_| false);
    Ok(match goal_lit {
        Some(l) => index.lookup(l).is_some_and(|id| closure.contains(id)),
        None => !index.consistent(&closure),
    })
}

/// No literal together with its negation, and no functional-dependency clash,
/// in the strict closure of `kb.necessary ∪ facts`.
pub fn consistent(kb: &KnowledgeBase, facts: &BTreeSet<Literal>) -> Result<bool, LogicError> {
    Ok(!entails(kb, facts, &Goal::Bottom)?)
}
