//! Incremental deliberation: a document grown one statement at a time,
//! with the recommendation recomputed after every write.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dialectic::{Label, Trace, Verdict};
use crate::dsl::{parse, parse_literal, serialize, Document, DslError};
use crate::error::EngineError;
use crate::recommend::{recommend, Fallback, Recommendation};
use crate::{justify, EngineConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Write {
    Add(String),
    Undo,
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Parse(#[from] DslError),
    #[error("stale revision {given}; the session is at revision {current}")]
    Conflict { given: u64, current: u64 },
    #[error("nothing to undo")]
    NothingToUndo,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistoryEntry {
    pub statement: String,
    pub revision: u64,
    pub recommendation: String,
}

struct Step {
    statement: String,
    revision: u64,
    doc: Document,
    recommendation: Recommendation,
}

pub struct Session {
    pub id: String,
    initial: String,
    config: EngineConfig,
    fallback: Fallback,
    log: Vec<Write>,
    base: (Document, Recommendation),
    steps: Vec<Step>,
    revision: u64,
}

/// Everything a client needs to render the session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    pub id: String,
    pub revision: u64,
    pub document: String,
    pub recommendation: Recommendation,
    pub history: Vec<HistoryEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictChange {
    pub act: String,
    pub before: Verdict,
    pub after: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelChange {
    pub conclusion: String,
    pub rules: Vec<String>,
    pub before: Option<Label>,
    pub after: Option<Label>,
}

/// What a write changed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Delta {
    pub before: String,
    pub after: String,
    pub flipped: bool,
    pub verdicts: Vec<VerdictChange>,
    pub arguments: Vec<LabelChange>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WriteResult {
    pub revision: u64,
    pub recommendation: Recommendation,
    pub delta: Delta,
}

fn labels(rec: &Recommendation) -> BTreeMap<(String, Vec<String>), Label> {
    let mut out = BTreeMap::new();
    for t in &rec.traces {
        for a in &t.arguments {
            out.insert((a.conclusion.clone(), a.rules.clone()), a.label);
        }
    }
    out
}

pub fn delta(old: &Recommendation, new: &Recommendation) -> Delta {
    let before: BTreeMap<&str, Verdict> = old.acts.iter().map(|a| (a.act.as_str(), a.verdict)).collect();
    let verdicts = new
        .acts
        .iter()
        .filter_map(|a| {
            let b = before.get(a.act.as_str()).copied().unwrap_or(Verdict::NoArgument);
            (b != a.verdict).then(|| VerdictChange {
                act: a.act.clone(),
                before: b,
                after: a.verdict,
            })
        })
        .collect();
    let (lo, ln) = (labels(old), labels(new));
    let mut keys: Vec<&(String, Vec<String>)> = lo.keys().chain(ln.keys()).collect();
    keys.sort();
    keys.dedup();
    let arguments = keys
        .into_iter()
        .filter_map(|k| {
            let (b, a) = (lo.get(k).copied(), ln.get(k).copied());
            (b != a).then(|| LabelChange {
                conclusion: k.0.clone(),
                rules: k.1.clone(),
                before: b,
                after: a,
            })
        })
        .collect();
    Delta {
        before: old.summary.clone(),
        after: new.summary.clone(),
        flipped: old.act != new.act,
        verdicts,
        arguments,
    }
}

impl Session {
    pub fn new(
        id: impl Into<String>,
        initial: &str,
        config: EngineConfig,
        fallback: Fallback,
    ) -> Result<Session, SessionError> {
        let doc = parse(initial)?;
        let rec = recommend(&doc.kb, &doc.model, &fallback, &config)?;
        Ok(Session {
            id: id.into(),
            initial: initial.to_string(),
            config,
            fallback,
            log: Vec::new(),
            base: (doc, rec),
            steps: Vec::new(),
            revision: 0,
        })
    }

    /// Rebuilds a session from its initial text and write log.
    pub fn replay(
        id: impl Into<String>,
        initial: &str,
        log: &[Write],
        config: EngineConfig,
        fallback: Fallback,
    ) -> Result<Session, SessionError> {
        let mut s = Session::new(id, initial, config, fallback)?;
        for w in log {
            match w {
                Write::Add(text) => {
                    s.add(text, None)?;
                }
                Write::Undo => {
                    s.undo(None)?;
                }
            }
        }
        Ok(s)
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn log(&self) -> &[Write] {
        &self.log
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn document(&self) -> &Document {
        self.steps.last().map(|s| &s.doc).unwrap_or(&self.base.0)
    }

    pub fn recommendation(&self) -> &Recommendation {
        self.steps
            .last()
            .map(|s| &s.recommendation)
            .unwrap_or(&self.base.1)
    }

    fn check(&self, expected: Option<u64>) -> Result<(), SessionError> {
        match expected {
            Some(given) if given != self.revision => Err(SessionError::Conflict {
                given,
                current: self.revision,
            }),
            _ => Ok(()),
        }
    }

    pub fn add(&mut self, text: &str, expected: Option<u64>) -> Result<WriteResult, SessionError> {
        self.check(expected)?;
        let doc = self.document().extend(text)?;
        let rec = recommend(&doc.kb, &doc.model, &self.fallback, &self.config)?;
        let d = delta(self.recommendation(), &rec);
        self.revision += 1;
        self.log.push(Write::Add(text.to_string()));
        self.steps.push(Step {
            statement: text.trim().to_string(),
            revision: self.revision,
            doc,
            recommendation: rec.clone(),
        });
        Ok(WriteResult {
            revision: self.revision,
            recommendation: rec,
            delta: d,
        })
    }

    pub fn undo(&mut self, expected: Option<u64>) -> Result<WriteResult, SessionError> {
        self.check(expected)?;
        let popped = self.steps.pop().ok_or(SessionError::NothingToUndo)?;
        self.revision += 1;
        self.log.push(Write::Undo);
        let rec = self.recommendation().clone();
        Ok(WriteResult {
            revision: self.revision,
            delta: delta(&popped.recommendation, &rec),
            recommendation: rec,
        })
    }

    pub fn query(&self, literal: &str) -> Result<Trace, SessionError> {
        let goal = parse_literal(literal)?;
        let doc = self.document();
        Ok(justify(&doc.kb, &doc.model, &goal, &self.config)?)
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            id: self.id.clone(),
            revision: self.revision,
            document: serialize(self.document()),
            recommendation: self.recommendation().clone(),
            history: self
                .steps
                .iter()
                .map(|s| HistoryEntry {
                    statement: s.statement.clone(),
                    revision: s.revision,
                    recommendation: s.recommendation.summary.clone(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
prop expense, whether_drove_alfa, how_chairman_reacts.
act rent_alfa, rent_econo.
state sA0, sE.
root rent_alfa = sA0.
root rent_econo = sE.
chance sA0 : dept_pays = 0.4 ? sA1 : sA2.
assess u(sA1 | expense, whether_drove_alfa) = 10.
assess u(sA2 | expense, whether_drove_alfa) = -1.
utility sE = 2.
";

    fn session() -> Session {
        Session::new("t", BASE, EngineConfig::default(), Fallback::None).unwrap()
    }

    #[test]
    fn add_then_undo_restores() {
        let mut s = session();
        let before = s.snapshot();
        let w = s
            .add("assess u(sA1 | expense, whether_drove_alfa, how_chairman_reacts) = -9.", None)
            .unwrap();
        assert_eq!(w.revision, 1);
        assert!(w.delta.flipped);
        let u = s.undo(Some(1)).unwrap();
        assert_eq!(u.revision, 2);
        assert_eq!(s.recommendation(), &before.recommendation);
        assert_eq!(s.document(), &parse(BASE).unwrap());
        assert!(s.snapshot().history.is_empty());
    }

    #[test]
    fn refused_writes_leave_no_trace() {
        let mut s = session();
        assert!(matches!(s.add("# nothing", None), Err(SessionError::Parse(_))));
        assert!(matches!(s.add("utility sE = 3.", Some(4)), Err(SessionError::Conflict { given: 4, current: 0 })));
        assert!(matches!(s.undo(None), Err(SessionError::NothingToUndo)));
        assert_eq!(s.revision(), 0);
        assert!(s.log().is_empty());
    }

    #[test]
    fn replay_matches() {
        let mut s = session();
        s.add("assess u(sE | expense) = 3.", None).unwrap();
        s.undo(None).unwrap();
        assert!(s.add("utility sE = 3.", None).is_err());
        s.add("prop extra.", None).unwrap();
        let r = Session::replay("t", s.initial(), s.log(), EngineConfig::default(), Fallback::None).unwrap();
        assert_eq!(r.snapshot(), s.snapshot());
    }

    #[test]
    fn delta_reports_label_changes() {
        let mut s = session();
        let w = s
            .add("assess u(sA2 | expense, whether_drove_alfa, how_chairman_reacts) = -9.", None)
            .unwrap();
        assert!(w.delta.arguments.iter().any(|c| c.before == Some(Label::Undefeated) && c.after == Some(Label::Defeated)));
        assert_eq!(w.delta.before, "ACT rent_alfa (u=3.4 vs 2)");
    }
}
