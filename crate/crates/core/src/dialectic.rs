//! Attacks, grounded labeling and justification.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::argument::{construct_for, ArgKey, Argument, Derivation};
use crate::logic::{LitId, Literal};
use crate::schemata::Theory;
use crate::specificity::{more_specific_with, Activations, Specificity};
use crate::EngineConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Defeat,
    Interference,
}

/// `attacker` and `target` index into the pool.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttackEdge {
    pub attacker: usize,
    pub target: usize,
    pub point: LitId,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    Undefeated,
    Defeated,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Justified,
    Denied,
    Interference,
    NoArgument,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Justified => "JUSTIFIED",
            Verdict::Denied => "DENIED",
            Verdict::Interference => "INTERFERENCE",
            Verdict::NoArgument => "NO_ARGUMENT",
        })
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Undefeated => "UNDEFEATED",
            Label::Defeated => "DEFEATED",
            Label::Undecided => "UNDECIDED",
        })
    }
}

/// Caches pairwise specificity over one theory.
pub struct Comparator<'t> {
    theory: &'t Theory,
    cap: usize,
    ids: HashMap<ArgKey, usize>,
    cache: HashMap<(usize, usize), Specificity>,
    activations: Activations,
    pub approximate: bool,
}

impl<'t> Comparator<'t> {
    pub fn new(theory: &'t Theory, cap: usize) -> Self {
        Comparator {
            theory,
            cap,
            ids: HashMap::new(),
            cache: HashMap::new(),
            activations: Activations::default(),
            approximate: false,
        }
    }

    fn id(&mut self, a: &Argument) -> usize {
        let next = self.ids.len();
        *self.ids.entry(a.key()).or_insert(next)
    }

    pub fn compare(&mut self, a: &Argument, b: &Argument) -> Specificity {
        let (ia, ib) = (self.id(a), self.id(b));
        self.compare_ids(ia, a, ib, b)
    }

    fn compare_ids(&mut self, ia: usize, a: &Argument, ib: usize, b: &Argument) -> Specificity {
        if let Some(&s) = self.cache.get(&(ia, ib)) {
            return s;
        }
        let c = more_specific_with(self.theory, a, b, self.cap, &mut self.activations);
        self.approximate |= c.approximate;
        self.cache.insert((ib, ia), c.outcome.flip());
        self.cache.insert((ia, ib), c.outcome);
        c.outcome
    }

    /// Indexes a pool for [`counterarguments`].
    pub fn index(&mut self, pool: &[Argument]) -> PoolIndex {
        let mut concluding: HashMap<LitId, Vec<usize>> = HashMap::new();
        for (i, a) in pool.iter().enumerate() {
            if !a.is_trivial() {
                concluding.entry(a.conclusion).or_default().push(i);
            }
        }
        PoolIndex {
            concluding,
            ids: pool.iter().map(|a| self.id(a)).collect(),
        }
    }
}

/// Non-trivial pool members by conclusion, plus comparator ids.
pub struct PoolIndex {
    concluding: HashMap<LitId, Vec<usize>>,
    ids: Vec<usize>,
}

/// Attacks on `pool[target]`: at each point the attacker's conclusion
/// contradicts, the attacker is weighed against the target's sub-argument
/// for that point. `index` is [`Comparator::index`] of the pool.
pub fn counterarguments(
    theory: &Theory,
    target: usize,
    pool: &[Argument],
    index: &PoolIndex,
    cmp: &mut Comparator<'_>,
) -> Vec<AttackEdge> {
    let mut out = Vec::new();
    let y = &pool[target];
    for &point in &y.points {
        let attackers: Vec<usize> = theory
            .index()
            .clashes_with(point)
            .iter()
            .filter_map(|c| index.concluding.get(c))
            .flatten()
            .copied()
            .collect();
        if attackers.is_empty() {
            continue;
        }
        let Some(sub) = y.sub_argument(theory, point) else {
            continue;
        };
        let sub_id = cmp.id(&sub);
        for i in attackers {
            let kind = match cmp.compare_ids(index.ids[i], &pool[i], sub_id, &sub) {
                Specificity::AStrict => EdgeKind::Defeat,
                Specificity::BStrict => continue,
                Specificity::Equivalent | Specificity::Incomparable => EdgeKind::Interference,
            };
            out.push(AttackEdge {
                attacker: i,
                target,
                point,
                kind,
            });
        }
    }
    out
}

/// Least fixpoint of: undefeated when every attacker is defeated, defeated
/// when some attacker is undefeated.
pub fn label_arguments(n: usize, edges: &[AttackEdge]) -> Vec<Label> {
    let mut attackers: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for e in edges {
        attackers[e.target].insert(e.attacker);
    }
    let mut labels: Vec<Option<Label>> = vec![None; n];
    loop {
        let mut changed = false;
        for i in 0..n {
            if labels[i].is_some() {
                continue;
            }
            let atk = &attackers[i];
            if atk.iter().all(|&a| labels[a] == Some(Label::Defeated)) {
                labels[i] = Some(Label::Undefeated);
                changed = true;
            } else if atk.iter().any(|&a| labels[a] == Some(Label::Undefeated)) {
                labels[i] = Some(Label::Defeated);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    labels
        .into_iter()
        .map(|l| l.unwrap_or(Label::Undecided))
        .collect()
}

/// The argument pool around one goal, with its attacks and labels.
pub struct Dialectic {
    pub goal: Literal,
    pub goal_id: Option<LitId>,
    pub rivals: Vec<LitId>,
    pub pool: Vec<Argument>,
    pub edges: Vec<AttackEdge>,
    pub labels: Vec<Label>,
    pub verdict: Verdict,
    pub partial: bool,
    pub approximate: bool,
}

impl Dialectic {
    pub fn arguments_for(&self, lit: LitId) -> impl Iterator<Item = (usize, &Argument)> {
        self.pool
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.conclusion == lit)
    }
}

/// Builds the pool for `goal` and its rivals, closed under sub-arguments and
/// rivals of every attackable point, then labels it.
pub fn justify(theory: &Theory, goal: &Literal, config: &EngineConfig) -> Dialectic {
    let goal_id = theory.lookup(goal);
    let rivals = theory.rivals(goal);
    let mut queue: Vec<LitId> = goal_id.into_iter().chain(rivals.iter().copied()).collect();
    let mut done: BTreeSet<LitId> = BTreeSet::new();
    let mut found: BTreeMap<ArgKey, Argument> = BTreeMap::new();
    let mut partial = false;
    let mut spent = 0usize;
    while let Some(lit) = queue.pop() {
        if !done.insert(lit) {
            continue;
        }
        let left = config.budget.saturating_sub(spent);
        if left == 0 {
            partial = true;
            break;
        }
        let c = construct_for(theory, lit, left);
        spent += c.steps;
        partial |= c.partial;
        for arg in c.arguments {
            for &p in &arg.points {
                if !done.contains(&p) {
                    queue.push(p);
                }
                for &r in theory.index().clashes_with(p) {
                    if !done.contains(&r) {
                        queue.push(r);
                    }
                }
            }
            found.entry(arg.key()).or_insert(arg);
        }
    }
    let pool: Vec<Argument> = found.into_values().collect();
    let mut cmp = Comparator::new(theory, config.specificity_cap);
    let index = cmp.index(&pool);
    let mut edges: Vec<AttackEdge> = (0..pool.len())
        .flat_map(|t| counterarguments(theory, t, &pool, &index, &mut cmp))
        .collect();
    edges.sort();
    edges.dedup();
    let labels = label_arguments(pool.len(), &edges);

    let label_of = |set: &dyn Fn(LitId) -> bool, want: Label| {
        pool.iter()
            .zip(&labels)
            .any(|(a, &l)| set(a.conclusion) && l == want)
    };
    let is_goal = |l: LitId| Some(l) == goal_id;
    let is_rival = |l: LitId| rivals.contains(&l);
    let goal_in = label_of(&is_goal, Label::Undefeated);
    let rival_in = label_of(&is_rival, Label::Undefeated);
    let goal_open = label_of(&is_goal, Label::Undecided);
    let rival_open = label_of(&is_rival, Label::Undecided);
    let verdict = if goal_in && !rival_in && !rival_open {
        Verdict::Justified
    } else if rival_in && !goal_in && !goal_open {
        Verdict::Denied
    } else if goal_open || rival_open || (goal_in && rival_in) {
        Verdict::Interference
    } else {
        Verdict::NoArgument
    };
    Dialectic {
        goal: goal.clone(),
        goal_id,
        rivals,
        pool,
        edges,
        labels,
        verdict,
        partial,
        approximate: cmp.approximate,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub goal: String,
    pub verdict: Verdict,
    pub partial: bool,
    pub approximate: bool,
    pub rivals: Vec<String>,
    pub arguments: Vec<TraceArgument>,
    pub edges: Vec<TraceEdge>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceArgument {
    pub id: String,
    pub conclusion: String,
    pub label: Label,
    pub rules: Vec<String>,
    pub sub_conclusions: Vec<String>,
    pub contingent_base: Vec<String>,
    pub derivation: Vec<TraceStep>,
}

/// One node of a derivation, children before parents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub conclusion: String,
    pub rule: Option<String>,
    pub premises: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEdge {
    pub attacker: String,
    pub target: String,
    pub point: String,
    pub kind: EdgeKind,
}

pub fn argument_id(i: usize) -> String {
    format!("A{}", i + 1)
}

fn steps(theory: &Theory, d: &Derivation, out: &mut Vec<TraceStep>) {
    for p in &d.premises {
        steps(theory, p, out);
    }
    let step = TraceStep {
        conclusion: theory.literal(d.literal).to_string(),
        rule: d.rule.map(|r| theory.rule(r).to_string()),
        premises: d
            .premises
            .iter()
            .map(|p| theory.literal(p.literal).to_string())
            .collect(),
    };
    if !out.contains(&step) {
        out.push(step);
    }
}

impl Dialectic {
    pub fn trace(&self, theory: &Theory) -> Trace {
        let show = |l: LitId| theory.literal(l).to_string();
        let arguments = self
            .pool
            .iter()
            .zip(&self.labels)
            .enumerate()
            .map(|(i, (a, &label))| {
                let mut derivation = Vec::new();
                steps(theory, &a.derivation, &mut derivation);
                TraceArgument {
                    id: argument_id(i),
                    conclusion: show(a.conclusion),
                    label,
                    rules: a.support.iter().map(|&r| theory.rule(r).to_string()).collect(),
                    sub_conclusions: a
                        .points
                        .iter()
                        .filter(|&&p| p != a.conclusion)
                        .map(|&p| show(p))
                        .collect(),
                    contingent_base: a.base.iter().map(|&b| show(b)).collect(),
                    derivation,
                }
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| TraceEdge {
                attacker: argument_id(e.attacker),
                target: argument_id(e.target),
                point: show(e.point),
                kind: e.kind,
            })
            .collect();
        let mut notes: Vec<String> = theory.notes().to_vec();
        if self.partial {
            notes.push("budget exhausted: the argument pool may be incomplete".into());
        }
        if self.approximate {
            notes.push(
                "some specificity comparisons used the base-inclusion fallback".into(),
            );
        }
        Trace {
            goal: self.goal.to_string(),
            verdict: self.verdict,
            partial: self.partial,
            approximate: self.approximate,
            rivals: self.rivals.iter().map(|&r| show(r)).collect(),
            arguments,
            edges,
            notes,
        }
    }
}
