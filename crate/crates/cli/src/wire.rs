//! JSONL trace records. Atoms travel as triples `[layer, n, m]`; for
//! structures other than the minima family the triple is
//! `[family, key, payload]`.

use serde::{Deserialize, Serialize};

use kspace_core::learner::TraceStep;
use kspace_core::{Atom, Outcome, Run};

use crate::instance::Instance;

pub type Triple = [u64; 3];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Record {
    Step(StepRecord),
    Summary(SummaryRecord),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub chosen: Triple,
    /// Retracted entries with the step at which each was added.
    pub removed: Vec<(Triple, usize)>,
    pub state_after: Vec<Triple>,
    pub realizer_output: Vec<Triple>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireOutcome {
    Zero,
    StepCapExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub problem: String,
    pub structure: String,
    pub learner: String,
    pub outcome: WireOutcome,
    pub start: Vec<Triple>,
    pub final_state: Vec<Triple>,
    pub witness: Vec<u64>,
    pub steps: usize,
    pub accepted: bool,
}

fn triples(atoms: impl IntoIterator<Item = Atom>) -> Vec<Triple> {
    atoms.into_iter().map(|a| a.triple()).collect()
}

pub fn step_record(instance: &Instance, step: &TraceStep) -> StepRecord {
    StepRecord {
        step: step.step,
        chosen: step.chosen.triple(),
        removed: step.removed.iter().map(|e| (e.atom.triple(), e.step)).collect(),
        state_after: triples(instance.sorted_state(&step.state_after)),
        realizer_output: triples(instance.canonical(step.realizer_output.iter().copied())),
    }
}

pub fn summary_record(instance: &Instance, run: &Run, learner: &str) -> SummaryRecord {
    let witness = instance.problem.solution(&run.final_state);
    SummaryRecord {
        problem: instance.problem.description().to_string(),
        structure: instance.structure.name(),
        learner: learner.to_string(),
        outcome: match run.outcome {
            Outcome::Zero => WireOutcome::Zero,
            Outcome::StepCapExceeded => WireOutcome::StepCapExceeded,
        },
        start: triples(instance.sorted_state(&run.start)),
        final_state: triples(instance.sorted_state(&run.final_state)),
        accepted: instance.problem.contains(&witness),
        witness: witness.0,
        steps: run.steps(),
    }
}

pub fn to_line(record: &Record) -> String {
    serde_json::to_string(record).expect("records always serialize")
}
