use crate::logic::LogicError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("oracle refused: {count} defeasible rule instances exceed the enumeration limit of {limit}")]
    OracleScale { count: usize, limit: usize },
    #[error("rollup refused at state `{state}`: {reason}")]
    Rollup { state: String, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown act `{0}`")]
    UnknownAct(String),
    #[error("state `{0}` is already expanded; chain another event on one of its children")]
    AlreadyExpanded(String),
    #[error("probability {0} is outside [0, 1]")]
    Probability(String),
    #[error("state `{0}` is already declared")]
    DuplicateState(String),
    #[error("state `{child}` already has parent `{parent}`")]
    SecondParent { child: String, parent: String },
    #[error("expansion of `{0}` would create a cycle")]
    Cycle(String),
    #[error("conflicting assessment for {target}: existing value {existing}, new value {new}")]
    AssessmentConflict {
        target: String,
        existing: String,
        new: String,
    },
    #[error("an assessment needs a non-empty basis")]
    EmptyBasis,
    #[error("salience threshold must be positive")]
    Threshold,
    #[error("model has no acts")]
    NoActs,
}
