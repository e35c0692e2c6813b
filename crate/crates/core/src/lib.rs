//! Layered knowledge spaces and a timestamped learner that finds sound zeros
//! of realizers.
//!
//! - [`knowledge`]: atoms, knowledge states, layered structures and the
//!   guarded view through which truth is evaluated.
//! - [`operators`]: realizers and the `New` filter.
//! - [`semantics`]: soundness, completeness, models and problems.
//! - [`learner`]: the timestamped learner and an untimestamped baseline.
//! - [`problems`]: concrete structures.

pub mod error;
pub mod knowledge;
pub mod learner;
pub mod operators;
pub mod problems;
pub mod semantics;

pub use error::{Error, Result};
pub use knowledge::{
    eval_truth, guard_stats, Atom, GuardStats, KnowledgeState, LayeredStructure, Level, QuestionId, StateView,
};
pub use learner::{find_sound_zero, naive_learn, LearnerConfig, Outcome, Run, SelectionPolicy, TraceStep};
pub use operators::{check_realizer_laws, is_zero, new_filter, wrap, AtomSet, Operator, Realizer};
pub use semantics::{
    build_model, derive_realizer, is_complete_on, is_model_on, is_sound, Problem, QuestionWindow, Witness,
};
