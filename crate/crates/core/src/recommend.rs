//! Act recommendation over the whole theory.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dialectic::{justify, Dialectic, Label, Trace, Verdict};
use crate::error::{EngineError, ModelError};
use crate::logic::{Atom, KnowledgeBase, Literal, Schema, Sym};
use crate::model::DecisionModel;
use crate::schemata::Theory;
use crate::value::Value;
use crate::EngineConfig;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum Fallback {
    #[default]
    None,
    /// Acts in order of untutored inclination.
    Inclination(Vec<Sym>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RecommendationKind {
    Act,
    Interference,
    NoArgument,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActStatus {
    pub act: String,
    pub verdict: Verdict,
    /// Justified utility of the act's root state, when there is one.
    pub utility: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recommendation {
    pub verdict: RecommendationKind,
    pub act: Option<String>,
    pub contenders: Vec<String>,
    pub fallback_used: bool,
    pub summary: String,
    pub acts: Vec<ActStatus>,
    pub traces: Vec<Trace>,
}

fn prefer_values(
    theory: &Theory,
    model: &DecisionModel,
    d: &Dialectic,
    act: &str,
) -> BTreeMap<Sym, (Value, Value)> {
    let mut out = BTreeMap::new();
    for ((_, a), &l) in d.pool.iter().enumerate().zip(&d.labels) {
        if l != Label::Undefeated || Some(a.conclusion) != d.goal_id {
            continue;
        }
        let Some(r) = a.derivation.rule else { continue };
        let rule = theory.rule(r);
        if let Some(Schema::Prefer { act: winner, rival }) = rule.schema() {
            if &**winner != act {
                continue;
            }
            let vals: Vec<Value> = rule
                .body
                .iter()
                .filter_map(|l| l.value().cloned())
                .collect();
            if let [x, y] = vals.as_slice() {
                // Body literals are sorted; recover which side is ours.
                let (mine, theirs) = match &rule.body[0].atom {
                    Atom::Utility { state, .. } if Some(state) == model.root_of(winner) => (x, y),
                    _ => (y, x),
                };
                out.insert(rival.clone(), (mine.clone(), theirs.clone()));
            }
        }
    }
    out
}

/// Justified utility of a root, read off the undefeated utility arguments in
/// an act's pool.
fn justified_root(theory: &Theory, d: &Dialectic, root: &Sym) -> Option<Value> {
    let mut vals: Vec<&Value> = d
        .pool
        .iter()
        .zip(&d.labels)
        .filter(|(_, &l)| l == Label::Undefeated)
        .filter_map(|(a, _)| match &theory.literal(a.conclusion).atom {
            Atom::Utility { state, value } if state == root => Some(value),
            _ => None,
        })
        .collect();
    vals.sort();
    vals.dedup();
    match vals.as_slice() {
        [v] => Some((*v).clone()),
        _ => None,
    }
}

pub fn recommend(
    kb: &KnowledgeBase,
    model: &DecisionModel,
    fallback: &Fallback,
    config: &EngineConfig,
) -> Result<Recommendation, EngineError> {
    let acts: Vec<Sym> = if model.acts().is_empty() {
        kb.vocabulary.acts.iter().cloned().collect()
    } else {
        model.acts().to_vec()
    };
    if acts.is_empty() && *fallback == Fallback::None {
        return Ok(Recommendation {
            verdict: RecommendationKind::NoArgument,
            act: None,
            contenders: Vec::new(),
            fallback_used: false,
            summary: "NO_ARGUMENT".into(),
            acts: Vec::new(),
            traces: Vec::new(),
        });
    }
    if acts.is_empty() {
        return Err(ModelError::NoActs.into());
    }
    let goals: Vec<Literal> = acts.iter().map(|a| Literal::do_act(a)).collect();
    let theory = Theory::compile(kb, model, config, &goals)?;
    let dialectics: Vec<Dialectic> = goals.iter().map(|g| justify(&theory, g, config)).collect();
    let verdict_of = |a: &Sym| {
        let i = acts.iter().position(|x| x == a).expect("known act");
        dialectics[i].verdict
    };
    let mut winners = Vec::new();
    let mut statuses = Vec::new();
    let mut detail: BTreeMap<Sym, BTreeMap<Sym, (Value, Value)>> = BTreeMap::new();
    for (i, a) in acts.iter().enumerate() {
        let d = &dialectics[i];
        let prefs = prefer_values(&theory, model, d, a);
        let beaten = acts.iter().filter(|b| *b != a).all(|b| {
            prefs.contains_key(b) || verdict_of(b) == Verdict::Denied
        });
        if d.verdict == Verdict::Justified && beaten {
            winners.push(a.clone());
        }
        let utility = model
            .root_of(a)
            .and_then(|root| justified_root(&theory, d, root));
        statuses.push(ActStatus {
            act: a.to_string(),
            verdict: d.verdict,
            utility,
        });
        detail.insert(a.clone(), prefs);
    }
    let traces: Vec<Trace> = dialectics.iter().map(|d| d.trace(&theory)).collect();
    let (verdict, act, contenders, summary) = if winners.len() == 1 {
        let a = &winners[0];
        let prefs = &detail[a];
        let summary = if prefs.is_empty() {
            format!("ACT {a}")
        } else {
            let mine = prefs.values().next().map(|(x, _)| x.to_string()).unwrap_or_default();
            let theirs: Vec<String> = acts
                .iter()
                .filter_map(|b| prefs.get(b).map(|(_, y)| y.to_string()))
                .collect();
            format!("ACT {a} (u={mine} vs {})", theirs.join(", "))
        };
        (RecommendationKind::Act, Some(a.to_string()), Vec::new(), summary)
    } else {
        let contenders: Vec<Sym> = if winners.len() > 1 {
            winners.clone()
        } else {
            acts.iter()
                .filter(|a| matches!(verdict_of(a), Verdict::Justified | Verdict::Interference))
                .cloned()
                .collect()
        };
        let names: Vec<String> = contenders.iter().map(|c| c.to_string()).collect();
        if names.is_empty() {
            (RecommendationKind::NoArgument, None, names, "NO_ARGUMENT".to_string())
        } else {
            let summary = format!("INTERFERENCE {}", names.join(", "));
            (RecommendationKind::Interference, None, names, summary)
        }
    };
    let mut rec = Recommendation {
        verdict,
        act,
        contenders,
        fallback_used: false,
        summary,
        acts: statuses,
        traces,
    };
    if let (Fallback::Inclination(order), RecommendationKind::Interference | RecommendationKind::NoArgument) =
        (fallback, rec.verdict)
    {
        let inclined: Vec<&Sym> = order.iter().filter(|a| acts.contains(a)).collect();
        let is_contender = |a: &Sym| rec.contenders.iter().any(|c| c.as_str() == &**a);
        let pick = inclined
            .iter()
            .copied()
            .find(|a| is_contender(a))
            .or_else(|| acts.iter().find(|a| is_contender(a)))
            .or_else(|| inclined.first().copied())
            .or_else(|| acts.first())
            .cloned();
        if let Some(a) = pick {
            rec.summary = format!("ACT {a} (fallback; {})", rec.summary);
            rec.verdict = RecommendationKind::Act;
            rec.act = Some(a.to_string());
            rec.fallback_used = true;
        }
    }
    Ok(rec)
}
