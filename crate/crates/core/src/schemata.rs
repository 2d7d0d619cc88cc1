//! Built-in reasoning schemata, compiled into ground rule instances.
//!
//! Instantiation is demand-driven: contributions are generated only for
//! formulas that occur in the knowledge base (and their sub-conjunctions up
//! to `max_arity`), utilities only for declared states, and numeric schemata
//! only for value combinations that some other instance can actually
//! conclude.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::EngineError;
use crate::logic::{
    conjunction_rules, ActTerm, Atom, KnowledgeBase, LitId, LitSet, Literal, Origin, PropFormula,
    Rule, RuleId, RuleIndex, Schema, Strength, Sym,
};
use crate::model::DecisionModel;
use crate::value::Value;
use crate::EngineConfig;

/// A knowledge base and decision model compiled to ground rules.
pub struct Theory {
    index: RuleIndex,
    necessary: Vec<LitId>,
    evidence: Vec<LitId>,
    evidence_set: LitSet,
    strict_base: LitSet,
    grounds: BTreeMap<LitId, BTreeSet<LitId>>,
    defeasible: Vec<RuleId>,
    notes: Vec<String>,
}

impl Theory {
    pub fn compile(
        kb: &KnowledgeBase,
        model: &DecisionModel,
        config: &EngineConfig,
        extra: &[Literal],
    ) -> Result<Theory, EngineError> {
        Compiler::new(kb, model, config, extra)?.run()
    }

    pub fn index(&self) -> &RuleIndex {
        &self.index
    }

    pub fn lookup(&self, lit: &Literal) -> Option<LitId> {
        self.index.lookup(lit)
    }

    pub fn literal(&self, id: LitId) -> &Literal {
        self.index.literal(id)
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        self.index.rule(id)
    }

    pub fn rules(&self) -> &[Rule] {
        self.index.rules()
    }

    pub fn defeasible_rules(&self) -> &[RuleId] {
        &self.defeasible
    }

    pub fn necessary(&self) -> &[LitId] {
        &self.necessary
    }

    pub fn evidence(&self) -> &[LitId] {
        &self.evidence
    }

    pub fn is_evidence(&self, id: LitId) -> bool {
        self.evidence_set.contains(id)
    }

    /// Closure of the evidence under strict rules alone.
    pub fn strict_base(&self) -> &LitSet {
        &self.strict_base
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// Evidence from which a member of the strict base follows.
    pub fn grounds(&self, id: LitId) -> Option<&BTreeSet<LitId>> {
        self.grounds.get(&id)
    }

    /// Closure of the evidence plus the given defeasible rules.
    pub fn closure_with(&self, support: &BTreeSet<RuleId>) -> LitSet {
        self.index
            .closure(self.evidence.iter().copied(), &|r| support.contains(&r))
    }

    /// Every interned literal that clashes with `lit`, whether or not `lit`
    /// itself is interned.
    pub fn rivals(&self, lit: &Literal) -> Vec<LitId> {
        match self.lookup(lit) {
            Some(id) => self.index.clashes_with(id).to_vec(),
            None => (0..self.index.literal_count())
                .filter(|&i| crate::logic::clash(lit, self.index.literal(i)))
                .collect(),
        }
    }
}

/// For each strictly derivable literal, the evidence of its first strict
/// derivation found.
fn strict_grounds(index: &RuleIndex, evidence: &[LitId]) -> BTreeMap<LitId, BTreeSet<LitId>> {
    let mut grounds: BTreeMap<LitId, BTreeSet<LitId>> =
        evidence.iter().map(|&e| (e, BTreeSet::from([e]))).collect();
    let strict: Vec<RuleId> = (0..index.rules().len())
        .filter(|&r| index.is_strict(r))
        .collect();
    loop {
        let mut changed = false;
        for &r in &strict {
            let head = index.rule_head(r);
            if grounds.contains_key(&head) {
                continue;
            }
            let body = index.rule_body(r);
            if body.iter().all(|b| grounds.contains_key(b)) {
                let g = body.iter().flat_map(|b| grounds[b].iter().copied()).collect();
                grounds.insert(head, g);
                changed = true;
            }
        }
        if !changed {
            return grounds;
        }
    }
}

struct Compiler<'a> {
    kb: &'a KnowledgeBase,
    model: &'a DecisionModel,
    config: &'a EngineConfig,
    extra: &'a [Literal],
    evidence: BTreeSet<Literal>,
    user: Vec<Rule>,
    universe: BTreeSet<PropFormula>,
    index: RuleIndex,
    seen: BTreeSet<Rule>,
    notes: Vec<String>,
}

impl<'a> Compiler<'a> {
    fn new(
        kb: &'a KnowledgeBase,
        model: &'a DecisionModel,
        config: &'a EngineConfig,
        extra: &'a [Literal],
    ) -> Result<Self, EngineError> {
        let mut evidence: BTreeSet<Literal> = kb.evidence().cloned().collect();
        evidence.extend(inherited_holds(kb, model));
        for (state, x) in model.expansions() {
            evidence.insert(Literal::pos(Atom::Prob {
                event: x.event.clone(),
                state: state.clone(),
                value: x.probability.clone(),
            }));
        }
        let user = kb.ground_rules(config.max_instances)?;
        Ok(Compiler {
            kb,
            model,
            config,
            extra,
            evidence,
            user,
            universe: BTreeSet::new(),
            index: RuleIndex::new(),
            seen: BTreeSet::new(),
            notes: Vec::new(),
        })
    }

    fn push(&mut self, rule: Rule) {
        if self.seen.insert(rule.clone()) {
            self.index.add_rule(rule);
        }
    }

    fn mentioned(&self) -> Vec<&Literal> {
        self.evidence
            .iter()
            .chain(self.extra.iter())
            .chain(self.user.iter().flat_map(|r| r.body.iter().chain([&r.head])))
            .collect()
    }

    fn build_universe(&mut self) {
        let mut universe = BTreeSet::new();
        for lit in self.mentioned() {
            for f in lit.formulas() {
                if f.negated() {
                    continue;
                }
                if f.len() <= self.config.max_arity {
                    universe.extend(f.subformulas());
                } else {
                    universe.insert(f.clone());
                    universe.extend(f.atoms().iter().map(|a| PropFormula::atom(a)));
                }
            }
        }
        self.universe = universe;
    }

    fn run(mut self) -> Result<Theory, EngineError> {
        self.build_universe();
        let mentioned: Vec<Literal> = self.mentioned().into_iter().cloned().collect();
        for r in conjunction_rules(mentioned.iter(), &self.universe) {
            self.push(r);
        }
        for r in std::mem::take(&mut self.user) {
            self.push(r);
        }
        for lit in self.evidence.clone() {
            self.index.intern(&lit);
        }
        let contr = self.contributions();
        let reach = self.reach();
        let utilities = self.utilities(&contr, &reach);
        self.comparisons(&utilities);
        self.practical(&reach);
        for lit in self.extra {
            self.index.intern(lit);
        }

        let evidence: Vec<LitId> = self
            .evidence
            .iter()
            .map(|l| self.index.lookup(l).expect("interned"))
            .collect();
        let necessary: Vec<LitId> = self
            .evidence
            .iter()
            .filter(|l| l.is_necessary_kind())
            .map(|l| self.index.lookup(l).expect("interned"))
            .collect();
        let mut evidence_set = LitSet::default();
        for &e in &evidence {
            evidence_set.insert(e);
        }
        let strict_base = self.index.closure(evidence.iter().copied(), &|_| false);
        let grounds = strict_grounds(&self.index, &evidence);
        let defeasible = (0..self.index.rules().len())
            .filter(|&r| !self.index.is_strict(r))
            .collect();
        Ok(Theory {
            index: self.index,
            necessary,
            evidence,
            evidence_set,
            strict_base,
            grounds,
            defeasible,
            notes: self.notes,
        })
    }

    /// Everything derivable if every rule fired, ignoring conflicts.
    fn reach(&self) -> LitSet {
        let seeds: Vec<LitId> = self
            .evidence
            .iter()
            .filter_map(|l| self.index.lookup(l))
            .collect();
        self.index.closure(seeds, &|_| true)
    }

    fn user_heads(&self) -> impl Iterator<Item = &Literal> {
        self.index
            .rules()
            .iter()
            .filter(|r| matches!(r.origin, Origin::User(_)))
            .map(|r| &r.head)
    }

    fn cap(&mut self, what: String, values: &mut BTreeSet<Value>) {
        if values.len() > self.config.max_candidates {
            self.notes.push(format!(
                "{what}: {} candidate values truncated to {}",
                values.len(),
                self.config.max_candidates
            ));
            while values.len() > self.config.max_candidates {
                values.pop_last();
            }
        }
    }

    /// Table entries as claims, plus additive composition over binary splits.
    fn contributions(&mut self) -> BTreeMap<PropFormula, BTreeSet<Value>> {
        let mut entries: BTreeMap<PropFormula, Value> = BTreeMap::new();
        for lit in &self.evidence {
            if let Atom::ContrEntry { formula, value } = &lit.atom {
                entries.insert(formula.clone(), value.clone());
            }
        }
        let mut user: BTreeMap<PropFormula, BTreeSet<Value>> = BTreeMap::new();
        for h in self.user_heads() {
            if let (false, Atom::Contr { formula, value }) = (h.negated, &h.atom) {
                user.entry(formula.clone()).or_default().insert(value.clone());
            }
        }
        let mut formulas: Vec<PropFormula> = self
            .universe
            .iter()
            .chain(entries.keys())
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        formulas.sort_by_key(|f| f.len());
        let mut cands: BTreeMap<PropFormula, BTreeSet<Value>> = BTreeMap::new();
        for f in formulas {
            let mut values = user.remove(&f).unwrap_or_default();
            if let Some(v) = entries.get(&f) {
                values.insert(v.clone());
                self.push(Rule::new(
                    "entry",
                    [Literal::pos(Atom::ContrEntry {
                        formula: f.clone(),
                        value: v.clone(),
                    })],
                    Literal::contr(f.clone(), v.clone()),
                    Strength::Defeasible,
                    Origin::Schema(Schema::Entry),
                ));
            }
            if f.len() <= self.config.max_arity {
                for (g, h) in f.binary_partitions() {
                    let (Some(xs), Some(ys)) = (cands.get(&g), cands.get(&h)) else {
                        continue;
                    };
                    let pairs: Vec<(Value, Value)> = xs
                        .iter()
                        .flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone())))
                        .collect();
                    for (x, y) in pairs {
                        let sum = &x + &y;
                        values.insert(sum.clone());
                        self.push(Rule::new(
                            "additive",
                            [
                                Literal::contr(g.clone(), x),
                                Literal::contr(h.clone(), y),
                            ],
                            Literal::contr(f.clone(), sum),
                            Strength::Defeasible,
                            Origin::Schema(Schema::Additive),
                        ));
                    }
                }
            }
            self.cap(format!("contr({f})"), &mut values);
            if !values.is_empty() {
                cands.insert(f, values);
            }
        }
        cands
    }

    /// Property-based, assessed and expected-utility instances for `u(s)`,
    /// children before parents.
    fn utilities(
        &mut self,
        contr: &BTreeMap<PropFormula, BTreeSet<Value>>,
        reach: &LitSet,
    ) -> BTreeMap<Sym, BTreeSet<Value>> {
        let mut cands: BTreeMap<Sym, BTreeSet<Value>> = BTreeMap::new();
        let mut user: BTreeMap<Sym, BTreeSet<Value>> = BTreeMap::new();
        for h in self.user_heads() {
            if let (false, Atom::Utility { state, value }) = (h.negated, &h.atom) {
                user.entry(state.clone()).or_default().insert(value.clone());
            }
        }
        let mut states: Vec<Sym> = self.kb.vocabulary.states.iter().cloned().collect();
        for s in self.model.states() {
            if !states.contains(s) {
                states.push(s.clone());
            }
        }
        let order = self.model.post_order(&states);
        let assessments: Vec<Literal> = self
            .evidence
            .iter()
            .filter(|l| !l.negated && matches!(l.atom, Atom::Assess { .. }))
            .cloned()
            .collect();
        for s in order {
            let mut values = user.remove(&s).unwrap_or_default();
            for (f, vs) in contr {
                let holds = Literal::pos(Atom::Holds {
                    formula: f.clone(),
                    state: s.clone(),
                });
                if !self.index.lookup(&holds).is_some_and(|id| reach.contains(id)) {
                    continue;
                }
                for v in vs {
                    values.insert(v.clone());
                    self.push(Rule::new(
                        "state-property",
                        [holds.clone(), Literal::contr(f.clone(), v.clone())],
                        Literal::pos(Atom::Utility {
                            state: s.clone(),
                            value: v.clone(),
                        }),
                        Strength::Defeasible,
                        Origin::Schema(Schema::StateProperty),
                    ));
                }
            }
            for a in assessments.iter() {
                if let Atom::Assess { state, value, .. } = &a.atom {
                    if *state != s {
                        continue;
                    }
                    values.insert(value.clone());
                    self.push(Rule::new(
                        "assessment",
                        [a.clone()],
                        Literal::pos(Atom::Utility {
                            state: s.clone(),
                            value: value.clone(),
                        }),
                        Strength::Defeasible,
                        Origin::Schema(Schema::Assessment),
                    ));
                }
            }
            if let Some(x) = self.model.expansion(&s) {
                let empty = BTreeSet::new();
                let pos = cands.get(&x.positive).unwrap_or(&empty).clone();
                let neg = cands.get(&x.negative).unwrap_or(&empty).clone();
                if pos.is_empty() || neg.is_empty() {
                    let missing = if pos.is_empty() { &x.positive } else { &x.negative };
                    self.notes.push(format!(
                        "expected utility of {s} on {}: no utility argument for child {missing}; the instance cannot activate",
                        x.event
                    ));
                }
                let k = x.probability.clone();
                let rest = &Value::one() - &k;
                let prob = Literal::pos(Atom::Prob {
                    event: x.event.clone(),
                    state: s.clone(),
                    value: k.clone(),
                });
                for v1 in &pos {
                    for v2 in &neg {
                        let eu = &(&k * v1) + &(&rest * v2);
                        values.insert(eu.clone());
                        self.push(Rule::new(
                            "expected-utility",
                            [
                                Literal::utility(&x.positive, v1.clone()),
                                Literal::utility(&x.negative, v2.clone()),
                                prob.clone(),
                            ],
                            Literal::utility(&s, eu),
                            Strength::Defeasible,
                            Origin::Schema(Schema::ExpectedUtility {
                                event: x.event.clone(),
                            }),
                        ));
                    }
                }
            }
            self.cap(format!("u({s})"), &mut values);
            if !values.is_empty() {
                cands.insert(s, values);
            }
        }
        cands
    }

    /// Pairwise act comparisons on the utilities of their root states.
    fn comparisons(&mut self, utilities: &BTreeMap<Sym, BTreeSet<Value>>) {
        let roots: Vec<(Sym, Sym)> = self
            .model
            .roots()
            .iter()
            .map(|(a, s)| (a.clone(), s.clone()))
            .collect();
        let empty = BTreeSet::new();
        for (i, (a, ra)) in roots.iter().enumerate() {
            for (b, rb) in roots.iter().skip(i + 1) {
                if ra == rb {
                    continue;
                }
                let xs = utilities.get(ra).unwrap_or(&empty);
                let ys = utilities.get(rb).unwrap_or(&empty);
                for x in xs {
                    for y in ys {
                        let body = [
                            Literal::utility(ra, x.clone()),
                            Literal::utility(rb, y.clone()),
                        ];
                        let (win, lose) = match x.cmp(y) {
                            std::cmp::Ordering::Greater => (a, b),
                            std::cmp::Ordering::Less => (b, a),
                            std::cmp::Ordering::Equal => continue,
                        };
                        self.push(Rule::new(
                            "prefer",
                            body.clone(),
                            Literal::do_act(win),
                            Strength::Defeasible,
                            Origin::Schema(Schema::Prefer {
                                act: win.clone(),
                                rival: lose.clone(),
                            }),
                        ));
                        self.push(Rule::new(
                            "reject",
                            body,
                            Literal::not_do(lose),
                            Strength::Defeasible,
                            Origin::Schema(Schema::Reject {
                                act: lose.clone(),
                                rival: win.clone(),
                            }),
                        ));
                    }
                }
            }
        }
    }

    /// Qualitative practical reasoning: achieving something desirable is a
    /// reason to act, achieving something undesirable a reason not to, and
    /// doing each part is a reason to do a joint act.
    fn practical(&mut self, reach: &LitSet) {
        let mut achieved: Vec<(ActTerm, PropFormula)> = Vec::new();
        let mut joint: BTreeSet<ActTerm> = BTreeSet::new();
        for id in 0..self.index.literal_count() {
            let lit = self.index.literal(id);
            match &lit.atom {
                Atom::Achieves { act, formula } => {
                    if act.is_joint() {
                        joint.insert(act.clone());
                    }
                    if !lit.negated && !formula.negated() && reach.contains(id) {
                        achieved.push((act.clone(), formula.clone()));
                    }
                }
                Atom::Do(act) if act.is_joint() => {
                    joint.insert(act.clone());
                }
                _ => {}
            }
        }
        let reachable = |idx: &RuleIndex, lit: &Literal| {
            idx.lookup(lit).is_some_and(|id| reach.contains(id))
        };
        for (act, d) in achieved {
            let ach = Literal::pos(Atom::Achieves {
                act: act.clone(),
                formula: d.clone(),
            });
            let des = Literal::pos(Atom::Desir(d.clone()));
            let und = Literal::pos(Atom::Undesir(d.clone()));
            if reachable(&self.index, &des) {
                self.push(Rule::new(
                    "achieve",
                    [ach.clone(), des],
                    Literal::pos(Atom::Do(act.clone())),
                    Strength::Defeasible,
                    Origin::Schema(Schema::Achieve),
                ));
            }
            if reachable(&self.index, &und) {
                self.push(Rule::new(
                    "avoid",
                    [ach, und],
                    Literal::neg(Atom::Do(act.clone())),
                    Strength::Defeasible,
                    Origin::Schema(Schema::Avoid),
                ));
            }
        }
        for j in joint {
            self.push(Rule::new(
                "compose",
                j.acts().iter().map(|a| Literal::pos(Atom::Do(ActTerm::single(a)))),
                Literal::pos(Atom::Do(j.clone())),
                Strength::Defeasible,
                Origin::Schema(Schema::Compose),
            ));
        }
    }
}

/// Children of an expansion inherit the parent's descriptions: the positive
/// child adds the event to each positive conjunction, the negative child gets
/// the parent's facts plus the negated event.
pub fn inherited_holds(kb: &KnowledgeBase, model: &DecisionModel) -> BTreeSet<Literal> {
    let mut facts: BTreeMap<Sym, BTreeSet<PropFormula>> = BTreeMap::new();
    for lit in &kb.contingent {
        if let (false, Atom::Holds { formula, state }) = (lit.negated, &lit.atom) {
            facts.entry(state.clone()).or_default().insert(formula.clone());
        }
    }
    let mut out = BTreeSet::new();
    for state in model.pre_order() {
        let Some(x) = model.expansion(&state) else {
            continue;
        };
        let parent: Vec<PropFormula> = facts.get(&state).cloned().unwrap_or_default().into_iter().collect();
        let event = PropFormula::atom(&x.event);
        let mut pos: BTreeSet<PropFormula> = BTreeSet::new();
        let mut neg: BTreeSet<PropFormula> = BTreeSet::new();
        let positives: Vec<&PropFormula> = parent.iter().filter(|f| !f.negated()).collect();
        if positives.is_empty() {
            pos.insert(event.clone());
        }
        for f in &parent {
            if f.negated() {
                pos.insert(f.clone());
            } else {
                pos.insert(f.with_atom(&x.event));
            }
            neg.insert(f.clone());
        }
        neg.insert(event.negate());
        for (child, set) in [(&x.positive, pos), (&x.negative, neg)] {
            for f in set {
                out.insert(Literal::pos(Atom::Holds {
                    formula: f.clone(),
                    state: child.clone(),
                }));
                facts.entry(child.clone()).or_default().insert(f);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::sym;

    fn v(s: &str) -> Value {
        s.parse().unwrap()
    }

    fn entry(atoms: &[&str], value: &str) -> Literal {
        Literal::pos(Atom::ContrEntry {
            formula: PropFormula::conj(atoms),
            value: v(value),
        })
    }

    #[test]
    fn pump_formula_yields_single_value() {
        let mut kb = KnowledgeBase::default();
        kb.vocabulary.props.insert(sym("P1"));
        kb.add_fact(entry(&["P1"], "10"));
        let query = Literal::contr(PropFormula::conj(&["P1", "P1"]), v("20"));
        let t = Theory::compile(&kb, &DecisionModel::default(), &EngineConfig::default(), &[query])
            .unwrap();
        let heads: Vec<String> = t
            .rules()
            .iter()
            .filter(|r| matches!(r.head.atom, Atom::Contr { .. }))
            .map(|r| r.head.to_string())
            .collect();
        assert_eq!(heads, vec!["contr(P1) = 10"]);
    }

    #[test]
    fn additive_values_for_all_splits() {
        let mut kb = KnowledgeBase::default();
        for (p, x) in [("P", "3"), ("Q", "1"), ("R", "5")] {
            kb.vocabulary.props.insert(sym(p));
            kb.add_fact(entry(&[p], x));
        }
        let q = Literal::contr(PropFormula::conj(&["P", "Q", "R"]), v("9"));
        let t = Theory::compile(&kb, &DecisionModel::default(), &EngineConfig::default(), &[q])
            .unwrap();
        let target = PropFormula::conj(&["P", "Q", "R"]);
        let values: BTreeSet<Value> = t
            .rules()
            .iter()
            .filter_map(|r| match &r.head.atom {
                Atom::Contr { formula, value } if *formula == target => Some(value.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(values, BTreeSet::from([v("9")]));
        let splits = t
            .rules()
            .iter()
            .filter(|r| r.name == "additive" && matches!(&r.head.atom, Atom::Contr { formula, .. } if *formula == target))
            .count();
        assert_eq!(splits, 3);
    }

    #[test]
    fn arity_cap_limits_additive_composition() {
        let mut kb = KnowledgeBase::default();
        for p in ["A", "B", "C"] {
            kb.vocabulary.props.insert(sym(p));
            kb.add_fact(entry(&[p], "1"));
        }
        let q = Literal::contr(PropFormula::conj(&["A", "B", "C"]), v("3"));
        let config = EngineConfig {
            max_arity: 2,
            ..EngineConfig::default()
        };
        let t = Theory::compile(&kb, &DecisionModel::default(), &config, &[q]).unwrap();
        assert!(t
            .rules()
            .iter()
            .all(|r| r.name != "additive" || r.head.formulas()[0].len() <= 2));
    }

    #[test]
    fn children_inherit_parent_descriptions() {
        let mut kb = KnowledgeBase::default();
        kb.vocabulary.states.insert(sym("s"));
        kb.vocabulary.props.insert(sym("P"));
        kb.add_fact(Literal::holds(PropFormula::atom("P"), "s"));
        let mut model = DecisionModel::default();
        model.add_state(sym("s")).unwrap();
        let model = model
            .expand(&sym("s"), &sym("E"), v("0.5"), sym("s1"), sym("s2"))
            .unwrap();
        let facts: Vec<String> = inherited_holds(&kb, &model).iter().map(|l| l.to_string()).collect();
        assert_eq!(
            facts,
            vec!["holds(~E, s2)", "holds(E & P, s1)", "holds(P, s2)"]
        );
    }
}
