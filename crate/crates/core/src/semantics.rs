//! Soundness, completeness and models, checked relative to a finite window of
//! questions.
//!
//! Models of an unbounded structure are usually infinite, so completeness is
//! only ever decided on a [`QuestionWindow`]: a finite set of questions plus
//! an enumeration-index cutoff bounding the candidate answers. For finite
//! structures a window can cover everything, see [`QuestionWindow::full`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::knowledge::{enumerate_prefix, eval_truth, Atom, KnowledgeState, LayeredStructure, Level, QuestionId};
use crate::operators::{is_zero, wrap, AtomSet, Realizer};

/// Default cap on the number of subsets an exhaustive enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 20;

/// A finite set of questions with an enumeration-index bound on candidate
/// answers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuestionWindow {
    questions: BTreeSet<QuestionId>,
    answer_cutoff: usize,
}

impl QuestionWindow {
    pub fn new<I: IntoIterator<Item = QuestionId>>(questions: I, answer_cutoff: usize) -> Result<Self> {
        let questions: BTreeSet<_> = questions.into_iter().collect();
        if questions.is_empty() {
            return Err(Error::EmptyWindow);
        }
        Ok(QuestionWindow {
            questions,
            answer_cutoff,
        })
    }

    /// Every question and atom of a finite structure. Fails if the structure
    /// has more than `limit` atoms.
    pub fn full(structure: &dyn LayeredStructure, limit: usize) -> Result<Self> {
        let atoms = enumerate_prefix(structure, limit + 1);
        if atoms.len() > limit {
            return Err(Error::InvalidArgument(format!(
                "structure {} has more than {limit} atoms",
                structure.name()
            )));
        }
        Self::new(atoms.iter().map(|a| a.question), atoms.len())
    }

    pub fn questions(&self) -> &BTreeSet<QuestionId> {
        &self.questions
    }

    pub fn answer_cutoff(&self) -> usize {
        self.answer_cutoff
    }

    /// Candidate answers to window questions, in enumeration order.
    pub fn candidates(&self, structure: &dyn LayeredStructure) -> Vec<Atom> {
        enumerate_prefix(structure, self.answer_cutoff)
            .into_iter()
            .filter(|a| self.questions.contains(&a.question))
            .collect()
    }

    fn candidates_by_question(&self, structure: &dyn LayeredStructure) -> BTreeMap<QuestionId, Vec<Atom>> {
        let mut grouped: BTreeMap<QuestionId, Vec<Atom>> =
            self.questions.iter().map(|q| (*q, Vec::new())).collect();
        for atom in self.candidates(structure) {
            grouped.entry(atom.question).or_default().push(atom);
        }
        grouped
    }
}

/// An element of the carrier: a tuple of naturals.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Witness(pub Vec<u64>);

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0.iter().join(","))
    }
}

type Predicate = dyn Fn(&Witness) -> bool + Send + Sync;
type Solution = dyn Fn(&KnowledgeState) -> Witness + Send + Sync;

/// A predicate on witnesses together with the map reading a witness off a
/// state.
#[derive(Clone)]
pub struct Problem {
    description: String,
    contains: Arc<Predicate>,
    solution: Arc<Solution>,
}

impl Problem {
    pub fn new<P, S>(description: impl Into<String>, contains: P, solution: S) -> Self
    where
        P: Fn(&Witness) -> bool + Send + Sync + 'static,
        S: Fn(&KnowledgeState) -> Witness + Send + Sync + 'static,
    {
        Problem {
            description: description.into(),
            contains: Arc::new(contains),
            solution: Arc::new(solution),
        }
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn contains(&self, witness: &Witness) -> bool {
        (self.contains)(witness)
    }

    pub fn solution(&self, state: &KnowledgeState) -> Witness {
        (self.solution)(state)
    }

    /// Whether the witness read off `state` solves the problem.
    pub fn solved_at(&self, state: &KnowledgeState) -> bool {
        self.contains(&self.solution(state))
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("description", &self.description)
            .finish_non_exhaustive()
    }
}

/// Every atom of `state` is true at `state`.
pub fn is_sound(structure: &dyn LayeredStructure, state: &KnowledgeState) -> Result<bool> {
    for atom in state.atoms() {
        if !eval_truth(structure, atom, state)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every open window question has only false candidates at `state`.
pub fn is_complete_on(
    structure: &dyn LayeredStructure,
    state: &KnowledgeState,
    window: &QuestionWindow,
) -> Result<bool> {
    for (question, candidates) in window.candidates_by_question(structure) {
        if state.is_answered(question) {
            continue;
        }
        for candidate in &candidates {
            if eval_truth(structure, candidate, state)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn is_model_on(
    structure: &dyn LayeredStructure,
    state: &KnowledgeState,
    window: &QuestionWindow,
) -> Result<bool> {
    Ok(is_sound(structure, state)? && is_complete_on(structure, state, window)?)
}

/// Builds a window model level by level: each open question of the current
/// level takes its first candidate (in enumeration order) that is true with
/// respect to the answers already chosen at lower levels.
pub fn build_model(structure: &dyn LayeredStructure, window: &QuestionWindow) -> Result<KnowledgeState> {
    let grouped = window.candidates_by_question(structure);
    let mut state = KnowledgeState::empty();
    for level in 0..=structure.max_level().0 {
        let level = Level(level);
        for (question, candidates) in &grouped {
            if structure.question_level(*question) != Some(level) {
                continue;
            }
            for candidate in candidates {
                if eval_truth(structure, candidate, &state)? {
                    state = state.add_answer(*candidate)?;
                    break;
                }
            }
        }
    }
    Ok(state)
}

/// All consistent subsets of the window's candidate atoms with at most
/// `size_bound` elements, ordered by size and then lexicographically by
/// enumeration index.
pub fn enumerate_states(
    structure: &dyn LayeredStructure,
    window: &QuestionWindow,
    size_bound: usize,
    cap: u128,
) -> Result<Vec<KnowledgeState>> {
    let atoms = window.candidates(structure);
    let top = size_bound.min(atoms.len());
    let space: u128 = (0..=top).map(|k| binomial(atoms.len() as u128, k as u128)).sum();
    if space > cap {
        return Err(Error::BudgetExceeded { space, cap });
    }
    let mut states = Vec::new();
    for size in 0..=top {
        for combo in atoms.iter().copied().combinations(size) {
            if let Ok(state) = KnowledgeState::from_atoms(combo) {
                states.push(state);
            }
        }
    }
    Ok(states)
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Exhaustive search for the sound zeros of `realizer` among the window's
/// consistent subsets of size at most `size_bound`.
pub fn brute_force_sound_zeros(
    structure: &dyn LayeredStructure,
    window: &QuestionWindow,
    realizer: &Realizer,
    size_bound: usize,
) -> Result<Vec<KnowledgeState>> {
    brute_force_sound_zeros_capped(structure, window, realizer, size_bound, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_sound_zeros_capped(
    structure: &dyn LayeredStructure,
    window: &QuestionWindow,
    realizer: &Realizer,
    size_bound: usize,
    cap: u128,
) -> Result<Vec<KnowledgeState>> {
    let mut zeros = Vec::new();
    for state in enumerate_states(structure, window, size_bound, cap)? {
        if is_sound(structure, &state)? && is_zero(realizer, &state)? {
            zeros.push(state);
        }
    }
    Ok(zeros)
}

/// All window models reachable by exhaustive enumeration.
pub fn window_models(
    structure: &dyn LayeredStructure,
    window: &QuestionWindow,
    cap: u128,
) -> Result<Vec<KnowledgeState>> {
    let mut models = Vec::new();
    for state in enumerate_states(structure, window, usize::MAX, cap)? {
        if is_model_on(structure, &state, window)? {
            models.push(state);
        }
    }
    Ok(models)
}

/// `state` lies outside the model set of `atom`: either `atom` is in the
/// state and false there, or its question is open and `atom` is true.
pub fn outside_model_of(structure: &dyn LayeredStructure, atom: &Atom, state: &KnowledgeState) -> Result<bool> {
    let held = state.contains(atom);
    let open = !state.is_answered(atom.question);
    if !held && !open {
        return Ok(false);
    }
    let truth = eval_truth(structure, atom, state)?;
    Ok((held && !truth) || (open && truth))
}

/// The realizer built from a problem whose solution is valid on all models:
/// empty where the problem is solved, otherwise the first atom (by
/// enumeration index, up to `search_budget`) whose model condition fails.
pub fn derive_realizer(structure: Arc<dyn LayeredStructure>, problem: Problem, search_budget: usize) -> Realizer {
    let inner = Arc::clone(&structure);
    let op = move |state: &KnowledgeState| -> Result<AtomSet> {
        if problem.solved_at(state) {
            return Ok(AtomSet::new());
        }
        for index in 0..=search_budget {
            let Some(atom) = inner.atom_at(index) else {
                break;
            };
            if outside_model_of(&*inner, &atom, state)? {
                return Ok(AtomSet::from([atom]));
            }
        }
        Err(Error::SearchBudgetExceeded {
            budget: search_budget,
        })
    };
    wrap(structure, op)
}
