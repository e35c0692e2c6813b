//! Knowledge structures and finite knowledge states.
//!
//! An [`Atom`] is one answer to one question. A [`KnowledgeState`] holds at
//! most one answer per question. A [`LayeredStructure`] assigns every atom a
//! level and a truth value relative to a state; the truth function only ever
//! sees the state through a [`StateView`] restricted to strictly lower levels,
//! so a structure cannot depend on answers of its own level or above even by
//! accident.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Finite level of an atom. Level 0 atoms are facts, higher levels are
/// hypotheses whose truth depends on lower levels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(pub u32);

impl Level {
    pub const FACT: Level = Level(0);
    pub const HYPOTHESIS: Level = Level(1);

    pub fn next(self) -> Level {
        Level(self.0 + 1)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identity of a question, i.e. of an equivalence class of mutually
/// incompatible answers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuestionId {
    pub family: u32,
    pub key: u64,
}

impl QuestionId {
    pub const fn new(family: u32, key: u64) -> Self {
        QuestionId { family, key }
    }
}

impl fmt::Display for QuestionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.family, self.key)
    }
}

/// One answer. Atoms are compared structurally; the derived order is by
/// `(family, key, payload)`, which is the order used for display and wire
/// output. Tie-breaking between atoms uses the structure's enumeration index
/// instead, see [`LayeredStructure::index_of`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub question: QuestionId,
    pub payload: u64,
    pub level: Level,
}

impl Atom {
    pub const fn new(question: QuestionId, payload: u64, level: Level) -> Self {
        Atom {
            question,
            payload,
            level,
        }
    }

    /// Wire form `[family, key, payload]`.
    pub fn triple(&self) -> [u64; 3] {
        [self.question.family as u64, self.question.key, self.payload]
    }

    /// Rebuilds an atom from its wire form, looking the level up in `structure`.
    pub fn from_triple(structure: &dyn LayeredStructure, triple: [u64; 3]) -> Result<Atom> {
        let family = u32::try_from(triple[0])
            .map_err(|_| Error::InvalidArgument(format!("family {} out of range", triple[0])))?;
        let question = QuestionId::new(family, triple[1]);
        let level = structure
            .question_level(question)
            .ok_or(Error::UnknownQuestion(question))?;
        let atom = Atom::new(question, triple[2], level);
        validate_atom(structure, &atom)?;
        Ok(atom)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{})",
            self.question.family, self.question.key, self.payload
        )
    }
}

/// A finite consistent set of atoms.
///
/// States are values: every update returns a new state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct KnowledgeState {
    answers: BTreeMap<QuestionId, Atom>,
}

impl KnowledgeState {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a state, failing on the first pair of incompatible atoms.
    /// Repeated atoms are collapsed.
    pub fn from_atoms<I: IntoIterator<Item = Atom>>(atoms: I) -> Result<Self> {
        let mut answers = BTreeMap::new();
        for atom in atoms {
            if answers.get(&atom.question) != Some(&atom) {
                insert_answer(&mut answers, atom)?;
            }
        }
        Ok(KnowledgeState { answers })
    }

    /// The unique answer to `question`, if any.
    pub fn query(&self, question: QuestionId) -> Option<&Atom> {
        self.answers.get(&question)
    }

    pub fn is_answered(&self, question: QuestionId) -> bool {
        self.answers.contains_key(&question)
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.answers.get(&atom.question) == Some(atom)
    }

    /// `self ∪ {atom}`; fails if the question already has an answer.
    pub fn add_answer(&self, atom: Atom) -> Result<Self> {
        let mut answers = self.answers.clone();
        insert_answer(&mut answers, atom)?;
        Ok(KnowledgeState { answers })
    }

    pub fn without(&self, atom: &Atom) -> Self {
        let mut answers = self.answers.clone();
        if answers.get(&atom.question) == Some(atom) {
            answers.remove(&atom.question);
        }
        KnowledgeState { answers }
    }

    /// Atoms of level strictly below `bound`.
    pub fn restrict(&self, bound: Level) -> Self {
        KnowledgeState {
            answers: self
                .answers
                .iter()
                .filter(|(_, atom)| atom.level < bound)
                .map(|(q, a)| (*q, *a))
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &KnowledgeState) -> bool {
        self.atoms().all(|a| other.contains(a))
    }

    /// Atoms in `(family, key, payload)` order.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.answers.values()
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }

    pub fn triples(&self) -> Vec<[u64; 3]> {
        self.atoms().map(Atom::triple).collect()
    }
}

fn insert_answer(answers: &mut BTreeMap<QuestionId, Atom>, atom: Atom) -> Result<()> {
    if let Some(existing) = answers.get(&atom.question) {
        return Err(Error::Consistency {
            question: atom.question,
            existing: *existing,
            incoming: atom,
        });
    }
    answers.insert(atom.question, atom);
    Ok(())
}

impl fmt::Display for KnowledgeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, atom) in self.atoms().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{atom}")?;
        }
        f.write_str("}")
    }
}

/// A layered knowledge structure with a fixed enumeration of its atoms.
///
/// Implementations must keep `truth` terminating on every finite state, and
/// may only read the state through the supplied view.
pub trait LayeredStructure: Send + Sync {
    fn name(&self) -> String;

    /// Upper bound on the levels used by atoms of this structure.
    fn max_level(&self) -> Level;

    /// The atom with canonical index `index`, or `None` past the end of a
    /// finite structure.
    fn atom_at(&self, index: usize) -> Option<Atom>;

    /// Inverse of [`atom_at`](Self::atom_at); `None` for foreign atoms.
    fn index_of(&self, atom: &Atom) -> Option<usize>;

    /// Level shared by all answers to `question`.
    fn question_level(&self, question: QuestionId) -> Option<Level>;

    /// Truth of `atom` relative to the restricted view of a state.
    fn truth(&self, atom: &Atom, view: &StateView<'_>) -> Result<bool>;
}

/// Fails unless `atom` is enumerated by `structure` with a consistent level.
pub fn validate_atom(structure: &dyn LayeredStructure, atom: &Atom) -> Result<()> {
    let expected = structure
        .question_level(atom.question)
        .ok_or(Error::UnknownQuestion(atom.question))?;
    if expected != atom.level {
        return Err(Error::LevelMismatch {
            atom: *atom,
            carried: atom.level,
            expected,
        });
    }
    if structure.index_of(atom).is_none() {
        return Err(Error::UnknownAtom(*atom));
    }
    Ok(())
}

/// The first `cutoff` atoms of the enumeration (fewer for finite structures).
pub fn enumerate_prefix(structure: &dyn LayeredStructure, cutoff: usize) -> Vec<Atom> {
    (0..cutoff).map_while(|i| structure.atom_at(i)).collect()
}

/// One read performed through a [`StateView`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    pub question: QuestionId,
    pub level: Level,
    pub answer: Option<Atom>,
    pub permitted: bool,
}

/// Read-only access to the part of a state below a level bound. Every read is
/// logged; a read of a question at or above the bound is a layer violation.
pub struct StateView<'a> {
    state: &'a KnowledgeState,
    bound: Level,
    structure: &'a dyn LayeredStructure,
    log: RefCell<Vec<QueryRecord>>,
}

impl<'a> StateView<'a> {
    pub fn new(structure: &'a dyn LayeredStructure, state: &'a KnowledgeState, bound: Level) -> Self {
        StateView {
            state,
            bound,
            structure,
            log: RefCell::new(Vec::new()),
        }
    }

    pub fn bound(&self) -> Level {
        self.bound
    }

    pub fn query(&self, question: QuestionId) -> Result<Option<Atom>> {
        let level = self
            .structure
            .question_level(question)
            .ok_or(Error::UnknownQuestion(question))?;
        let permitted = level < self.bound;
        let answer = if permitted {
            self.state.query(question).filter(|a| a.level < self.bound).copied()
        } else {
            None
        };
        self.log.borrow_mut().push(QueryRecord {
            question,
            level,
            answer,
            permitted,
        });
        if !permitted {
            LAYER_VIOLATIONS.fetch_add(1, Ordering::Relaxed);
            return Err(Error::LayerViolation {
                bound: self.bound,
                question,
                found: level,
            });
        }
        Ok(answer)
    }

    pub fn is_answered(&self, question: QuestionId) -> Result<bool> {
        Ok(self.query(question)?.is_some())
    }

    pub fn log(&self) -> Vec<QueryRecord> {
        self.log.borrow().clone()
    }

    fn into_log(self) -> Vec<QueryRecord> {
        self.log.into_inner()
    }
}

static TRUTH_EVALUATIONS: AtomicU64 = AtomicU64::new(0);
static LAYER_VIOLATIONS: AtomicU64 = AtomicU64::new(0);

/// Process-wide counters of truth evaluations and layer violations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GuardStats {
    pub evaluations: u64,
    pub violations: u64,
}

pub fn guard_stats() -> GuardStats {
    GuardStats {
        evaluations: TRUTH_EVALUATIONS.load(Ordering::Relaxed),
        violations: LAYER_VIOLATIONS.load(Ordering::Relaxed),
    }
}

/// Result of a logged truth evaluation.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: bool,
    pub queries: Vec<QueryRecord>,
}

/// Truth of `atom` at `state`, computed on `state` restricted below the
/// atom's level.
pub fn eval_truth(
    structure: &dyn LayeredStructure,
    atom: &Atom,
    state: &KnowledgeState,
) -> Result<bool> {
    eval_truth_traced(structure, atom, state).map(|e| e.value)
}

pub fn eval_truth_traced(
    structure: &dyn LayeredStructure,
    atom: &Atom,
    state: &KnowledgeState,
) -> Result<Evaluation> {
    validate_atom(structure, atom)?;
    TRUTH_EVALUATIONS.fetch_add(1, Ordering::Relaxed);
    let view = StateView::new(structure, state, atom.level);
    let value = structure.truth(atom, &view)?;
    Ok(Evaluation {
        value,
        queries: view.into_log(),
    })
}
