use thiserror::Error;

use crate::knowledge::{Atom, Level, QuestionId};
use crate::learner::Run;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two different answers to one question.
    #[error("question {question} is already answered by {existing}; cannot add {incoming}")]
    Consistency {
        question: QuestionId,
        existing: Atom,
        incoming: Atom,
    },

    /// A truth function looked at a question outside its layer.
    #[error("layer violation: truth of a level-{bound} atom queried {question} of level {found}")]
    LayerViolation {
        bound: Level,
        question: QuestionId,
        found: Level,
    },

    #[error("atom {0} does not belong to the structure")]
    UnknownAtom(Atom),

    #[error("question {0} does not belong to the structure")]
    UnknownQuestion(QuestionId),

    #[error("atom {atom} carries level {carried}, but its question has level {expected}")]
    LevelMismatch {
        atom: Atom,
        carried: Level,
        expected: Level,
    },

    #[error("a question window needs at least one question")]
    EmptyWindow,

    #[error("enumeration space of {space} subsets exceeds the cap of {cap}")]
    BudgetExceeded { space: u128, cap: u128 },

    #[error("no atom outside its model set among the first {budget} enumeration indices")]
    SearchBudgetExceeded { budget: usize },

    #[error("learner did not reach a zero within {cap} steps")]
    StepCapExceeded { cap: usize, partial: Box<Run> },

    #[error("the starting state is not sound")]
    UnsoundStart,

    #[error("invariant violated after step {step}: {detail}")]
    InvariantViolation { step: usize, detail: String },

    #[error("invalid function table: {0}")]
    InvalidTable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
