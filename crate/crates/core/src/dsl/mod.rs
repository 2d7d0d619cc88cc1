//! Knowledge-base text format.
//!
//! Line-oriented statements ending in `.`, `#` comments. Statement order
//! does not matter: declarations are collected before anything else is
//! checked. See `docs/dsl.md` for the grammar.

mod lexer;
mod parser;
mod serialize;

use std::collections::{BTreeMap, BTreeSet};

use crate::logic::{clash, Atom, KnowledgeBase, LogicError, Literal, PropFormula, Rule, Sort, Sym};
use crate::model::{add_assessment, DecisionModel};
use crate::value::Value;

pub use serialize::serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct DslError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl DslError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        DslError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Prop(Vec<Sym>),
    Act(Vec<Sym>),
    State(Vec<Sym>),
    Root {
        act: Sym,
        state: Sym,
    },
    Holds {
        state: Sym,
        props: Vec<PropFormula>,
    },
    Contr {
        formula: PropFormula,
        value: Value,
    },
    Assess {
        state: Sym,
        basis: BTreeSet<Sym>,
        value: Value,
    },
    Utility {
        state: Sym,
        value: Value,
    },
    Chance {
        state: Sym,
        event: Sym,
        k: Value,
        positive: Sym,
        negative: Sym,
    },
    Evidence(Literal),
    Rule(Rule),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub stmt: Stmt,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub statements: Vec<Statement>,
    pub kb: KnowledgeBase,
    pub model: DecisionModel,
}

pub fn parse(text: &str) -> Result<Document, DslError> {
    let statements = parser::Parser::new(text)?.statements()?;
    Document::build(statements)
}

/// A single literal such as `u(sA0) = 0.8` or `~do(rent_alfa)`.
pub fn parse_literal(text: &str) -> Result<Literal, DslError> {
    let mut p = parser::Parser::new(text)?;
    let lit = p.literal()?;
    p.finish()?;
    Ok(lit)
}

impl Document {
    /// Appends statements; positions in errors are relative to `text`.
    pub fn extend(&self, text: &str) -> Result<Document, DslError> {
        let added = parser::Parser::new(text)?.statements()?;
        if added.is_empty() {
            return Err(DslError::new(1, 1, "expected a statement, found only comments or whitespace"));
        }
        let mut all = self.statements.clone();
        all.extend(added);
        Document::build(all)
    }

    fn build(statements: Vec<Statement>) -> Result<Document, DslError> {
        let mut b = Builder::default();
        for s in &statements {
            b.declare(s)?;
        }
        for s in &statements {
            b.chance(s)?;
        }
        for s in &statements {
            b.facts(s)?;
        }
        b.check_evidence(&statements)?;
        Ok(Document {
            statements,
            kb: b.kb,
            model: b.model,
        })
    }
}

#[derive(Default)]
struct Builder {
    kb: KnowledgeBase,
    model: DecisionModel,
    declared: BTreeMap<Sym, Sort>,
    entries: BTreeMap<PropFormula, Value>,
    evidence_at: Vec<(Literal, usize, usize)>,
}

fn at(s: &Statement, message: impl Into<String>) -> DslError {
    DslError::new(s.line, s.column, message)
}

impl Builder {
    fn declare_one(&mut self, s: &Statement, name: &Sym, sort: Sort) -> Result<(), DslError> {
        if let Some(prev) = self.declared.get(name) {
            return Err(at(
                s,
                format!("duplicate declaration of `{name}` (already {})", sort_name(*prev)),
            ));
        }
        self.declared.insert(name.clone(), sort);
        match sort {
            Sort::Prop => {
                self.kb.vocabulary.props.insert(name.clone());
            }
            Sort::Act => {
                self.kb.vocabulary.acts.insert(name.clone());
                self.model.add_act(name.clone()).map_err(|e| at(s, e.to_string()))?;
            }
            Sort::State => {
                self.kb.vocabulary.states.insert(name.clone());
                self.model.add_state(name.clone()).map_err(|e| at(s, e.to_string()))?;
            }
        }
        Ok(())
    }

    fn declare(&mut self, s: &Statement) -> Result<(), DslError> {
        let (names, sort) = match &s.stmt {
            Stmt::Prop(n) => (n, Sort::Prop),
            Stmt::Act(n) => (n, Sort::Act),
            Stmt::State(n) => (n, Sort::State),
            _ => return Ok(()),
        };
        for n in names {
            self.declare_one(s, n, sort)?;
        }
        Ok(())
    }

    /// Chance nodes declare their event and any undeclared children.
    fn chance(&mut self, s: &Statement) -> Result<(), DslError> {
        let Stmt::Chance {
            event,
            positive,
            negative,
            ..
        } = &s.stmt
        else {
            return Ok(());
        };
        match self.declared.get(event) {
            None | Some(Sort::Prop) => {
                self.kb.vocabulary.events.insert(event.clone());
            }
            Some(other) => {
                return Err(at(s, format!("`{event}` is {}, not an event", sort_name(*other))))
            }
        }
        for child in [positive, negative] {
            if !self.declared.contains_key(child) {
                self.declare_one(s, child, Sort::State)?;
            }
        }
        Ok(())
    }

    fn check_sort(&self, s: &Statement, name: &Sym, sort: Sort, vars: bool) -> Result<(), DslError> {
        let ok = match sort {
            Sort::Prop => self.kb.vocabulary.is_property(name),
            Sort::Act => self.kb.vocabulary.acts.contains(name),
            Sort::State => self.kb.vocabulary.states.contains(name),
        };
        if ok || (vars && self.kb.vocabulary.is_variable(name)) {
            return Ok(());
        }
        Err(at(
            s,
            match self.declared.get(name) {
                Some(other) => format!(
                    "`{name}` is {}, but {} is required here",
                    sort_name(*other),
                    sort_name(sort)
                ),
                None => format!("undeclared identifier `{name}` ({} expected)", sort_name(sort)),
            },
        ))
    }

    fn check_literal(&self, s: &Statement, lit: &Literal, vars: bool) -> Result<(), DslError> {
        for (sort, name) in lit.symbols() {
            self.check_sort(s, &name, sort, vars)?;
        }
        Ok(())
    }

    fn facts(&mut self, s: &Statement) -> Result<(), DslError> {
        match &s.stmt {
            Stmt::Prop(_) | Stmt::Act(_) | Stmt::State(_) => {}
            Stmt::Root { act, state } => {
                self.check_sort(s, act, Sort::Act, false)?;
                self.check_sort(s, state, Sort::State, false)?;
                if let Some(prev) = self.model.root_of(act) {
                    return Err(at(s, format!("act `{act}` already has root `{prev}`")));
                }
                self.model
                    .set_root(act, state)
                    .map_err(|e| at(s, e.to_string()))?;
            }
            Stmt::Holds { state, props } => {
                for f in props {
                    let lit = Literal::holds(f.clone(), state);
                    self.check_literal(s, &lit, false)?;
                    self.add_evidence(s, lit)?;
                }
            }
            Stmt::Contr { formula, value } => {
                for a in formula.atoms() {
                    self.check_sort(s, a, Sort::Prop, false)?;
                }
                if let Some(prev) = self.entries.get(formula) {
                    return Err(at(
                        s,
                        format!("duplicate contribution entry for `{formula}` (already {prev})"),
                    ));
                }
                self.entries.insert(formula.clone(), value.clone());
                self.kb.add_fact(Literal::pos(Atom::ContrEntry {
                    formula: formula.clone(),
                    value: value.clone(),
                }));
            }
            Stmt::Assess {
                state,
                basis,
                value,
            } => {
                self.check_sort(s, state, Sort::State, false)?;
                for b in basis {
                    self.check_sort(s, b, Sort::Prop, false)?;
                }
                self.assess(s, state, basis.clone(), value)?;
            }
            Stmt::Utility { state, value } => {
                self.check_sort(s, state, Sort::State, false)?;
                self.assess(s, state, BTreeSet::new(), value)?;
            }
            Stmt::Chance {
                state,
                event,
                k,
                positive,
                negative,
            } => {
                self.check_sort(s, state, Sort::State, false)?;
                self.model = self
                    .model
                    .expand(state, event, k.clone(), positive.clone(), negative.clone())
                    .map_err(|e| at(s, e.to_string()))?;
            }
            Stmt::Evidence(lit) => {
                self.check_literal(s, lit, false)?;
                match &lit.atom {
                    Atom::Assess { state, basis, value } if !lit.negated => {
                        self.assess(s, state, basis.clone(), value)?;
                    }
                    _ => self.add_evidence(s, lit.clone())?,
                }
            }
            Stmt::Rule(rule) => {
                for lit in rule.body.iter().chain([&rule.head]) {
                    self.check_literal(s, lit, true)?;
                }
                // A zero limit checks variable sorts without instantiating.
                match crate::logic::ground_rule(rule, &self.kb.vocabulary, 0) {
                    Ok(_) | Err(LogicError::TooManyInstances { .. }) => {}
                    Err(e) => return Err(at(s, e.to_string())),
                }
                self.kb.add_rule(rule.clone());
            }
        }
        Ok(())
    }

    fn assess(
        &mut self,
        s: &Statement,
        state: &Sym,
        basis: BTreeSet<Sym>,
        value: &Value,
    ) -> Result<(), DslError> {
        add_assessment(&mut self.kb, state.clone(), basis, value.clone()).map_err(|e| at(s, e.to_string()))
    }

    fn add_evidence(&mut self, s: &Statement, lit: Literal) -> Result<(), DslError> {
        self.kb
            .add_contingent(lit.clone())
            .map_err(|e| at(s, e.to_string()))?;
        self.evidence_at.push((lit, s.line, s.column));
        Ok(())
    }

    fn check_evidence(&self, _statements: &[Statement]) -> Result<(), DslError> {
        for (i, (a, _, _)) in self.evidence_at.iter().enumerate() {
            for (b, line, column) in &self.evidence_at[i + 1..] {
                if clash(a, b) {
                    return Err(DslError::new(
                        *line,
                        *column,
                        format!("evidence `{b}` contradicts `{a}`"),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn sort_name(s: Sort) -> &'static str {
    match s {
        Sort::Prop => "a property",
        Sort::Act => "an act",
        Sort::State => "a state",
    }
}
