//! Operators on states and the realizer wrapper.
//!
//! An operator maps a finite state to a finite set of atoms. Wrapping an
//! operator with [`wrap`] filters its output down to the atoms that answer an
//! open question and are true at the input state, which yields a realizer.
//! The learners only accept [`Realizer`] values, so the realizer laws hold by
//! construction.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::knowledge::{eval_truth, eval_truth_traced, Atom, KnowledgeState, LayeredStructure, QuestionId};

pub type AtomSet = BTreeSet<Atom>;

/// A deterministic finite-output map from states to atom sets.
pub trait Operator: Send + Sync {
    fn apply(&self, state: &KnowledgeState) -> Result<AtomSet>;
}

impl<F> Operator for F
where
    F: Fn(&KnowledgeState) -> Result<AtomSet> + Send + Sync,
{
    fn apply(&self, state: &KnowledgeState) -> Result<AtomSet> {
        self(state)
    }
}

/// Atoms of `candidates` whose question is open in `state` and which are
/// true at `state`.
pub fn new_filter(
    structure: &dyn LayeredStructure,
    state: &KnowledgeState,
    candidates: &AtomSet,
) -> Result<AtomSet> {
    let mut kept = AtomSet::new();
    for atom in candidates {
        if state.is_answered(atom.question) {
            continue;
        }
        if eval_truth(structure, atom, state)? {
            kept.insert(*atom);
        }
    }
    Ok(kept)
}

/// An operator whose outputs always satisfy the realizer laws.
#[derive(Clone)]
pub struct Realizer {
    structure: Arc<dyn LayeredStructure>,
    inner: Arc<dyn Operator>,
}

/// `X ↦ new_filter(X, op(X))`.
pub fn wrap<O: Operator + 'static>(structure: Arc<dyn LayeredStructure>, op: O) -> Realizer {
    Realizer {
        structure,
        inner: Arc::new(op),
    }
}

/// The realizer with empty output everywhere.
pub fn constant_empty(structure: Arc<dyn LayeredStructure>) -> Realizer {
    wrap(structure, |_: &KnowledgeState| Ok(AtomSet::new()))
}

impl Realizer {
    pub fn structure(&self) -> &dyn LayeredStructure {
        &*self.structure
    }

    pub fn structure_arc(&self) -> Arc<dyn LayeredStructure> {
        Arc::clone(&self.structure)
    }

    pub fn apply(&self, state: &KnowledgeState) -> Result<AtomSet> {
        let raw = self.inner.apply(state)?;
        new_filter(&*self.structure, state, &raw)
    }

    /// Like [`apply`](Self::apply), also returning every question the filter
    /// consulted, including those read by truth evaluations.
    pub fn apply_traced(&self, state: &KnowledgeState) -> Result<(AtomSet, BTreeSet<QuestionId>)> {
        let raw = self.inner.apply(state)?;
        let mut touched = BTreeSet::new();
        let mut kept = AtomSet::new();
        for atom in &raw {
            touched.insert(atom.question);
            if state.is_answered(atom.question) {
                continue;
            }
            let eval = eval_truth_traced(&*self.structure, atom, state)?;
            touched.extend(eval.queries.iter().map(|q| q.question));
            if eval.value {
                kept.insert(*atom);
            }
        }
        Ok((kept, touched))
    }
}

impl Operator for Realizer {
    fn apply(&self, state: &KnowledgeState) -> Result<AtomSet> {
        Realizer::apply(self, state)
    }
}

impl fmt::Debug for Realizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Realizer")
            .field("structure", &self.structure.name())
            .finish_non_exhaustive()
    }
}

pub fn is_zero(realizer: &Realizer, state: &KnowledgeState) -> Result<bool> {
    Ok(realizer.apply(state)?.is_empty())
}

/// Verdict of both realizer laws for one output atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomVerdict {
    pub atom: Atom,
    /// The atom's question is open in the probed state.
    pub question_open: bool,
    /// The atom is true at the probed state.
    pub true_at_state: bool,
}

impl AtomVerdict {
    pub fn passed(&self) -> bool {
        self.question_open && self.true_at_state
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub verdicts: Vec<AtomVerdict>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(AtomVerdict::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AtomVerdict> + '_ {
        self.verdicts.iter().filter(|v| !v.passed())
    }
}

/// Checks both realizer laws on every atom `op` outputs at `state`.
pub fn check_realizer_laws(
    structure: &dyn LayeredStructure,
    op: &dyn Operator,
    state: &KnowledgeState,
) -> Result<LawReport> {
    let mut verdicts = Vec::new();
    for atom in op.apply(state)? {
        verdicts.push(AtomVerdict {
            atom,
            question_open: !state.is_answered(atom.question),
            true_at_state: eval_truth(structure, &atom, state)?,
        });
    }
    Ok(LawReport { verdicts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knowledge::tests::{Tiny, A, A2, B, H};

    fn tiny() -> Arc<dyn LayeredStructure> {
        Arc::new(Tiny)
    }

    fn set(atoms: &[Atom]) -> AtomSet {
        atoms.iter().copied().collect()
    }

    #[test]
    fn new_filter_drops_answered_and_false() {
        let s = KnowledgeState::from_atoms([A]).unwrap();
        assert!(new_filter(&Tiny, &s, &AtomSet::new()).unwrap().is_empty());
        // A2 shares A's question, H is false once A is known, B survives.
        let kept = new_filter(&Tiny, &s, &set(&[A2, B, H])).unwrap();
        assert_eq!(kept, set(&[B]));
    }

    #[test]
    fn wrap_of_constant_empty_is_empty() {
        let r = constant_empty(tiny());
        assert!(is_zero(&r, &KnowledgeState::empty()).unwrap());
    }

    #[test]
    fn wrap_keeps_law_abiding_output() {
        let r = wrap(tiny(), |_: &KnowledgeState| Ok(set(&[B, H])));
        assert_eq!(r.apply(&KnowledgeState::empty()).unwrap(), set(&[B, H]));
    }

    #[test]
    fn wrap_drops_blocked_atom() {
        let r = wrap(tiny(), |_: &KnowledgeState| Ok(set(&[A2])));
        let s = KnowledgeState::from_atoms([A]).unwrap();
        assert!(r.apply(&s).unwrap().is_empty());
    }

    #[test]
    fn law_report_flags_each_condition() {
        let s = KnowledgeState::from_atoms([A]).unwrap();
        let blocked = |_: &KnowledgeState| Ok(set(&[A2]));
        let report = check_realizer_laws(&Tiny, &blocked, &s).unwrap();
        assert!(!report.passed());
        assert!(!report.verdicts[0].question_open);

        let falsy = |_: &KnowledgeState| Ok(set(&[H]));
        let report = check_realizer_laws(&Tiny, &falsy, &s).unwrap();
        assert!(report.verdicts[0].question_open);
        assert!(!report.verdicts[0].true_at_state);

        let wrapped = wrap(tiny(), |_: &KnowledgeState| Ok(set(&[A2, B, H])));
        assert!(check_realizer_laws(&Tiny, &wrapped, &s).unwrap().passed());
    }

    #[test]
    fn wrap_is_idempotent_here() {
        let once = wrap(tiny(), |_: &KnowledgeState| Ok(set(&[A2, B, H])));
        let twice = wrap(tiny(), once.clone());
        for atoms in [vec![], vec![A], vec![B], vec![A, H], vec![B, H]] {
            let s = KnowledgeState::from_atoms(atoms).unwrap();
            assert_eq!(once.apply(&s).unwrap(), twice.apply(&s).unwrap());
        }
    }

    #[test]
    fn traced_application_reports_touched_questions() {
        let r = wrap(tiny(), |_: &KnowledgeState| Ok(set(&[H])));
        let (out, touched) = r.apply_traced(&KnowledgeState::empty()).unwrap();
        assert_eq!(out, set(&[H]));
        assert!(touched.contains(&H.question));
        assert!(touched.contains(&A.question));
    }
}
