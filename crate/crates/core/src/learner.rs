//! Learning a finite sound zero of a realizer.
//!
//! [`find_sound_zero`] repeatedly adds one atom proposed by the realizer. Each
//! addition may falsify hypotheses already in the state; every atom carries
//! the step at which it was added, and a falsified entry `(z, k)` retracts
//! every entry `(y, m)` with `level(z) <= level(y)` and `k <= m`, so whatever
//! was learned after a refuted hypothesis goes with it. With at most two
//! levels this always terminates.
//!
//! [`naive_learn`] is the same loop without timestamps: it only drops the
//! atoms that became false. It can cycle forever on two-level structures,
//! which is why its step-cap outcome is a normal result rather than an error.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knowledge::{eval_truth, Atom, KnowledgeState, LayeredStructure};
use crate::operators::{AtomSet, Realizer};
use crate::semantics::is_sound;

pub const DEFAULT_STEP_CAP: usize = 100_000;

/// How the learner picks one atom from the realizer's output.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SelectionPolicy {
    /// Smallest enumeration index.
    #[default]
    MinIndex,
    /// Uniform choice driven by a seeded generator.
    Random { seed: u64 },
}

impl SelectionPolicy {
    pub fn selector(self) -> Selector {
        let rng = match self {
            SelectionPolicy::MinIndex => None,
            SelectionPolicy::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        Selector { rng }
    }
}

/// A running instance of a [`SelectionPolicy`].
pub struct Selector {
    rng: Option<ChaCha8Rng>,
}

impl Selector {
    /// Picks a member of `candidates`, which must be non-empty.
    pub fn choose(&mut self, structure: &dyn LayeredStructure, candidates: &AtomSet) -> Atom {
        let mut ranked: Vec<(usize, Atom)> = candidates
            .iter()
            .map(|a| (structure.index_of(a).unwrap_or(usize::MAX), *a))
            .collect();
        ranked.sort();
        let pick = match &mut self.rng {
            None => 0,
            Some(rng) => rng.gen_range(0..ranked.len()),
        };
        ranked[pick].1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LearnerConfig {
    pub policy: SelectionPolicy,
    pub step_cap: usize,
    /// Re-check soundness of every intermediate state of [`find_sound_zero`].
    pub check_invariants: bool,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            policy: SelectionPolicy::MinIndex,
            step_cap: DEFAULT_STEP_CAP,
            check_invariants: true,
        }
    }
}

impl LearnerConfig {
    pub fn with_policy(mut self, policy: SelectionPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_step_cap(mut self, step_cap: usize) -> Self {
        self.step_cap = step_cap;
        self
    }
}

/// An atom together with the step at which it entered the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LedgerEntry {
    pub atom: Atom,
    pub step: usize,
}

/// The timestamped set driving retraction, plus the step clock.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LearnerLedger {
    entries: Vec<LedgerEntry>,
    clock: usize,
}

impl LearnerLedger {
    /// Every atom of the starting state is stamped 0.
    pub fn new(start: &KnowledgeState) -> Self {
        LearnerLedger {
            entries: start.atoms().map(|&atom| LedgerEntry { atom, step: 0 }).collect(),
            clock: 0,
        }
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn clock(&self) -> usize {
        self.clock
    }

    /// Projection of the ledger onto its atoms.
    pub fn state(&self) -> Result<KnowledgeState> {
        KnowledgeState::from_atoms(self.entries.iter().map(|e| e.atom))
    }

    /// Removes every entry made stale by a falsified entry at `extended`,
    /// returning the removed entries in ledger order.
    fn retract(&mut self, structure: &dyn LayeredStructure, extended: &KnowledgeState) -> Result<Vec<LedgerEntry>> {
        let mut falsified = Vec::new();
        for entry in &self.entries {
            if !eval_truth(structure, &entry.atom, extended)? {
                falsified.push(*entry);
            }
        }
        if falsified.is_empty() {
            return Ok(Vec::new());
        }
        let stale = |y: &LedgerEntry| {
            falsified
                .iter()
                .any(|z| z.atom.level <= y.atom.level && z.step <= y.step)
        };
        let (removed, kept): (Vec<_>, Vec<_>) = self.entries.iter().partition(|e| stale(e));
        self.entries = kept;
        Ok(removed)
    }

    fn record(&mut self, atom: Atom) -> usize {
        let step = self.clock;
        self.entries.push(LedgerEntry { atom, step });
        self.clock += 1;
        step
    }
}

/// One iteration of a learner loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub chosen: Atom,
    pub removed: Vec<LedgerEntry>,
    pub state_after: KnowledgeState,
    pub realizer_output: Vec<Atom>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The final state is a zero of the realizer.
    Zero,
    StepCapExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub start: KnowledgeState,
    pub final_state: KnowledgeState,
    pub trace: Vec<TraceStep>,
    pub outcome: Outcome,
}

impl Run {
    pub fn steps(&self) -> usize {
        self.trace.len()
    }

    pub fn completed(&self) -> bool {
        self.outcome == Outcome::Zero
    }
}

/// Timestamped learner. Requires a sound starting state; returns a sound
/// zero of `realizer` and the full trace.
pub fn find_sound_zero(realizer: &Realizer, start: &KnowledgeState, config: &LearnerConfig) -> Result<Run> {
    let structure = realizer.structure();
    if !is_sound(structure, start)? {
        return Err(Error::UnsoundStart);
    }
    let mut selector = config.policy.selector();
    let mut ledger = LearnerLedger::new(start);
    let mut state = start.clone();
    let mut trace = Vec::new();

    loop {
        let output = realizer.apply(&state)?;
        if output.is_empty() {
            return Ok(Run {
                start: start.clone(),
                final_state: state,
                trace,
                outcome: Outcome::Zero,
            });
        }
        if trace.len() >= config.step_cap {
            return Err(Error::StepCapExceeded {
                cap: config.step_cap,
                partial: Box::new(Run {
                    start: start.clone(),
                    final_state: state,
                    trace,
                    outcome: Outcome::StepCapExceeded,
                }),
            });
        }
        let chosen = selector.choose(structure, &output);
        let extended = state.add_answer(chosen)?;
        let removed = ledger.retract(structure, &extended)?;
        let step = ledger.record(chosen);
        state = ledger.state()?;

        if config.check_invariants && !is_sound(structure, &state)? {
            return Err(Error::InvariantViolation {
                step,
                detail: format!("state {state} is not sound"),
            });
        }
        trace.push(TraceStep {
            step,
            chosen,
            removed,
            state_after: state.clone(),
            realizer_output: output.into_iter().collect(),
        });
    }
}

/// Untimestamped learner: after adding the chosen atom, keeps exactly the old
/// atoms still true at the extended state. Hitting the step cap is reported
/// through [`Outcome::StepCapExceeded`].
pub fn naive_learn(realizer: &Realizer, start: &KnowledgeState, config: &LearnerConfig) -> Result<Run> {
    let structure = realizer.structure();
    if !is_sound(structure, start)? {
        return Err(Error::UnsoundStart);
    }
    let mut selector = config.policy.selector();
    let mut state = start.clone();
    // Insertion steps, for reporting only.
    let mut added_at: BTreeMap<Atom, usize> = start.atoms().map(|a| (*a, 0)).collect();
    let mut trace = Vec::new();

    loop {
        let output = realizer.apply(&state)?;
        let outcome = if output.is_empty() {
            Outcome::Zero
        } else if trace.len() >= config.step_cap {
            Outcome::StepCapExceeded
        } else {
            let step = trace.len();
            let chosen = selector.choose(structure, &output);
            let extended = state.add_answer(chosen)?;
            let mut kept = Vec::new();
            let mut removed = Vec::new();
            for atom in state.atoms() {
                if eval_truth(structure, atom, &extended)? {
                    kept.push(*atom);
                } else {
                    let step = added_at.remove(atom).unwrap_or(0);
                    removed.push(LedgerEntry { atom: *atom, step });
                }
            }
            kept.push(chosen);
            added_at.insert(chosen, step);
            state = KnowledgeState::from_atoms(kept)?;
            trace.push(TraceStep {
                step,
                chosen,
                removed,
                state_after: state.clone(),
                realizer_output: output.into_iter().collect(),
            });
            continue;
        };
        return Ok(Run {
            start: start.clone(),
            final_state: state,
            trace,
            outcome,
        });
    }
}
