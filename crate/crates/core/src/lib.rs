//! Decision analysis as defeasible argumentation.
//!
//! A knowledge base (properties, contribution table, assessments, rules) and
//! a decision model (acts, states, chance expansions) are compiled into
//! ground rules. Arguments are built by backward chaining, weighed by
//! specificity, and labeled with grounded semantics.

pub mod argument;
pub mod dialectic;
pub mod dot;
pub mod dsl;
pub mod error;
pub mod logic;
pub mod model;
pub mod recommend;
pub mod schemata;
pub mod session;
pub mod specificity;
pub mod value;

pub use dialectic::{Label, Trace, Verdict};
pub use dsl::{parse, parse_literal, serialize, Document, DslError};
pub use error::{EngineError, ModelError};
pub use logic::{KnowledgeBase, Literal};
pub use model::DecisionModel;
pub use recommend::{recommend, Fallback, Recommendation};
pub use schemata::Theory;
pub use value::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    /// Rule expansions allowed per query.
    pub budget: usize,
    /// Largest conjunction that gets additive decompositions.
    pub max_arity: usize,
    /// Candidate values kept per numeric quantity.
    pub max_candidates: usize,
    /// Ground instances allowed per user rule.
    pub max_instances: usize,
    /// Largest base union for exact specificity.
    pub specificity_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            budget: 100_000,
            max_arity: 4,
            max_candidates: 256,
            max_instances: 10_000,
            specificity_cap: 16,
        }
    }
}

/// Compiles `kb` and `model` and weighs every argument about `goal`.
pub fn justify(
    kb: &KnowledgeBase,
    model: &DecisionModel,
    goal: &Literal,
    config: &EngineConfig,
) -> Result<Trace, EngineError> {
    let theory = Theory::compile(kb, model, config, std::slice::from_ref(goal))?;
    Ok(dialectic::justify(&theory, goal, config).trace(&theory))
}
