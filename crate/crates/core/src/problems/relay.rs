//! A two-level fixture on which the untimestamped learner never stops.
//!
//! Facts `F_i` (question `(0, i)`, payload 0) are always true. Two hypothesis
//! questions `A = (1, 0)` and `B = (1, 1)` take answers `A_i` / `B_i`
//! (payload `i`), each true while fact `F_i` is unknown.
//!
//! The realizer relays between the two hypotheses:
//!
//! | state holds        | proposes          |
//! |--------------------|-------------------|
//! | neither            | `A_0`             |
//! | only `A_i`         | `B_(i+1)`         |
//! | only `B_j`         | `A_(j+1)`         |
//! | `A_i` and `B_j`    | `F_min(i,j)`      |
//!
//! Each new hypothesis is proposed because of the one already held. When the
//! older one is refuted the untimestamped learner drops only that one, the
//! survivor proposes a fresh partner, and the cycle repeats with a new fact
//! each round. The timestamped learner also drops the survivor (it was added
//! later) and then stops: `A_0` is false once `F_0` is known.
//!
//! The realizer reads only questions `A`, `B` and one fact, so it is
//! continuous; the structure is layered by construction.

use std::sync::Arc;

use crate::error::Result;
use crate::knowledge::{Atom, KnowledgeState, LayeredStructure, Level, QuestionId, StateView};
use crate::operators::{wrap, AtomSet, Realizer};
use crate::semantics::{Problem, Witness};

pub const HYPOTHESIS_A: QuestionId = QuestionId::new(1, 0);
pub const HYPOTHESIS_B: QuestionId = QuestionId::new(1, 1);

pub fn fact(i: u64) -> Atom {
    Atom::new(QuestionId::new(0, i), 0, Level::FACT)
}

pub fn hyp_a(i: u64) -> Atom {
    Atom::new(HYPOTHESIS_A, i, Level::HYPOTHESIS)
}

pub fn hyp_b(i: u64) -> Atom {
    Atom::new(HYPOTHESIS_B, i, Level::HYPOTHESIS)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RelayStructure;

impl LayeredStructure for RelayStructure {
    fn name(&self) -> String {
        "relay".into()
    }

    fn max_level(&self) -> Level {
        Level::HYPOTHESIS
    }

    fn atom_at(&self, index: usize) -> Option<Atom> {
        let i = (index / 3) as u64;
        Some(match index % 3 {
            0 => fact(i),
            1 => hyp_a(i),
            _ => hyp_b(i),
        })
    }

    fn index_of(&self, atom: &Atom) -> Option<usize> {
        let slot = if *atom == fact(atom.question.key) {
            0
        } else if *atom == hyp_a(atom.payload) {
            1
        } else if *atom == hyp_b(atom.payload) {
            2
        } else {
            return None;
        };
        let i = if slot == 0 { atom.question.key } else { atom.payload };
        usize::try_from(i).ok().map(|i| 3 * i + slot)
    }

    fn question_level(&self, question: QuestionId) -> Option<Level> {
        match question.family {
            0 => Some(Level::FACT),
            1 if question.key <= 1 => Some(Level::HYPOTHESIS),
            _ => None,
        }
    }

    fn truth(&self, atom: &Atom, view: &StateView<'_>) -> Result<bool> {
        if atom.level == Level::FACT {
            return Ok(true);
        }
        Ok(!view.is_answered(fact(atom.payload).question)?)
    }
}

/// Everything the CLI and tests need for the fixture.
pub struct RelaySetup {
    pub structure: Arc<RelayStructure>,
    pub problem: Problem,
    pub realizer: Realizer,
}

pub fn relay_realizer(structure: Arc<RelayStructure>) -> Realizer {
    wrap(structure, |state: &KnowledgeState| {
        let a = state.query(HYPOTHESIS_A).map(|x| x.payload);
        let b = state.query(HYPOTHESIS_B).map(|x| x.payload);
        let next = match (a, b) {
            (None, None) => hyp_a(0),
            (Some(i), None) => hyp_b(i + 1),
            (None, Some(j)) => hyp_a(j + 1),
            (Some(i), Some(j)) => fact(i.min(j)),
        };
        Ok(AtomSet::from([next]))
    })
}

/// The fixture's problem accepts every witness; the witness lists the known
/// facts.
pub fn relay_problem() -> Problem {
    Problem::new(
        "relay (any witness)",
        |_| true,
        |s| {
            Witness(
                s.atoms()
                    .filter(|a| a.level == Level::FACT)
                    .map(|a| a.question.key)
                    .collect(),
            )
        },
    )
}

pub fn relay_setup() -> RelaySetup {
    let structure = Arc::new(RelayStructure);
    RelaySetup {
        realizer: relay_realizer(Arc::clone(&structure)),
        structure,
        problem: relay_problem(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::{find_sound_zero, naive_learn, LearnerConfig, Outcome};

    #[test]
    fn enumeration_round_trips() {
        for i in 0..300 {
            let atom = RelayStructure.atom_at(i).unwrap();
            assert_eq!(RelayStructure.index_of(&atom), Some(i));
        }
        assert_eq!(RelayStructure.index_of(&Atom::new(HYPOTHESIS_A, 3, Level::FACT)), None);
    }

    #[test]
    fn timestamped_learner_stops_at_first_fact() {
        let setup = relay_setup();
        let run = find_sound_zero(&setup.realizer, &KnowledgeState::empty(), &LearnerConfig::default()).unwrap();
        assert_eq!(run.outcome, Outcome::Zero);
        assert_eq!(run.steps(), 3);
        assert_eq!(run.final_state, KnowledgeState::from_atoms([fact(0)]).unwrap());
    }

    #[test]
    fn naive_learner_keeps_cycling() {
        let setup = relay_setup();
        let config = LearnerConfig::default().with_step_cap(1000);
        let run = naive_learn(&setup.realizer, &KnowledgeState::empty(), &config).unwrap();
        assert_eq!(run.outcome, Outcome::StepCapExceeded);
        let states: Vec<String> = run.trace.iter().take(4).map(|t| t.state_after.to_string()).collect();
        assert_eq!(states[0], "{(1,0,0)}");
        assert_eq!(states[1], "{(1,0,0), (1,1,1)}");
        assert_eq!(states[2], "{(0,0,0), (1,1,1)}");
        assert_eq!(states[3], "{(0,0,0), (1,0,2), (1,1,1)}");
    }
}
