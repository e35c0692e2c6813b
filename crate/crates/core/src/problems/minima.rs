//! Monotone subsequences by learning local minima.
//!
//! Atoms are triples `(layer, n, m)` with `n < m`:
//!
//! - `(0, n, m)` states `f1(n) > f1(m)`, a counterexample to `n` being a local
//!   minimum of `f1`. It is a fact: its truth does not depend on the state.
//! - `(1, n, m)` states `f2(n) > f2(m)` where `n` and `m` are both believed to
//!   be `f1`-minima, i.e. no `(0, n, _)` and no `(0, m, _)` is known. It is a
//!   hypothesis and flips to false once either belief is refuted.
//!
//! The question of `(layer, n, m)` is `(layer, n)` and its level is `layer`.
//! Atoms are enumerated in blocks of equal `m`; within a block by `layer`,
//! then `n`. A prefix of the enumeration therefore covers exactly the atoms
//! with `m` below a bound.

use std::sync::Arc;

use crate::knowledge::{Atom, KnowledgeState, LayeredStructure, Level, QuestionId, StateView};
use crate::error::Result;
use crate::operators::{wrap, AtomSet, Realizer};
use crate::problems::FnTable;
use crate::semantics::{Problem, QuestionWindow, Witness};

/// Layer of a minima atom: 0 for `f1` facts, 1 for `f2` hypotheses.
pub type Layer = u32;

pub fn question(layer: Layer, n: u64) -> QuestionId {
    QuestionId::new(layer, n)
}

/// The atom `(layer, n, m)`. Panics unless `n < m` and `layer <= 1`.
pub fn minima_atom(layer: Layer, n: u64, m: u64) -> Atom {
    assert!(n < m, "minima atoms need n < m, got ({layer},{n},{m})");
    assert!(layer <= 1, "minima atoms have layer 0 or 1, got {layer}");
    Atom::new(question(layer, n), m, Level(layer))
}

/// The one- or two-layer minima structure.
#[derive(Clone, Debug)]
pub struct MinimaStructure {
    f1: FnTable,
    f2: Option<FnTable>,
}

impl MinimaStructure {
    pub fn new(f1: FnTable, f2: Option<FnTable>) -> Self {
        MinimaStructure { f1, f2 }
    }

    pub fn f1(&self) -> &FnTable {
        &self.f1
    }

    pub fn f2(&self) -> Option<&FnTable> {
        self.f2.as_ref()
    }

    pub fn layers(&self) -> u32 {
        if self.f2.is_some() {
            2
        } else {
            1
        }
    }

    fn block_start(&self, m: u64) -> u64 {
        self.layers() as u64 * m * m.saturating_sub(1) / 2
    }

    /// Window of questions `(layer, n)` with `n <= bound` and candidate
    /// answers with `m <= bound`.
    pub fn window(&self, bound: u64) -> QuestionWindow {
        let questions = (0..self.layers()).flat_map(|layer| (0..=bound).map(move |n| question(layer, n)));
        QuestionWindow::new(questions, self.block_start(bound + 1) as usize)
            .expect("a minima window always has questions")
    }
}

impl LayeredStructure for MinimaStructure {
    fn name(&self) -> String {
        match &self.f2 {
            None => format!("minima(f1={})", self.f1),
            Some(f2) => format!("minima(f1={}, f2={})", self.f1, f2),
        }
    }

    fn max_level(&self) -> Level {
        Level(self.layers() - 1)
    }

    fn atom_at(&self, index: usize) -> Option<Atom> {
        let index = index as u64;
        let layers = self.layers() as u64;
        // Largest m with block_start(m) <= index, starting from a float guess.
        let mut m = ((2.0 * index as f64 / layers as f64).sqrt() as u64).max(1);
        while self.block_start(m) > index {
            m -= 1;
        }
        while self.block_start(m + 1) <= index {
            m += 1;
        }
        let offset = index - self.block_start(m);
        let (layer, n) = (offset / m, offset % m);
        Some(minima_atom(layer as Layer, n, m))
    }

    fn index_of(&self, atom: &Atom) -> Option<usize> {
        let layer = atom.question.family;
        let (n, m) = (atom.question.key, atom.payload);
        if layer >= self.layers() || atom.level != Level(layer) || n >= m {
            return None;
        }
        usize::try_from(self.block_start(m) + layer as u64 * m + n).ok()
    }

    fn question_level(&self, question: QuestionId) -> Option<Level> {
        (question.family < self.layers()).then_some(Level(question.family))
    }

    fn truth(&self, atom: &Atom, view: &StateView<'_>) -> Result<bool> {
        let (n, m) = (atom.question.key, atom.payload);
        match (atom.question.family, &self.f2) {
            (0, _) => Ok(self.f1.eval(n) > self.f1.eval(m)),
            (1, Some(f2)) => {
                let n_believed = !view.is_answered(question(0, n))?;
                let m_believed = !view.is_answered(question(0, m))?;
                Ok(n_believed && m_believed && f2.eval(n) > f2.eval(m))
            }
            _ => Ok(false),
        }
    }
}

/// `n` is believed to be a minimum at `layer`: no counterexample `(0, n, _)`
/// is known, and for layer 1 additionally no `(1, n, _)`.
pub fn believed_minima(state: &KnowledgeState, layer: Layer, n: u64) -> bool {
    (0..=layer).all(|l| !state.is_answered(question(l, n)))
}

/// The `k` smallest naturals believed to be minima at `layer`, ascending.
pub fn alpha(state: &KnowledgeState, layer: Layer, k: usize) -> Witness {
    // At most |state| naturals are excluded, so this scan is bounded.
    Witness((0..).filter(|&n| believed_minima(state, layer, n)).take(k).collect())
}

/// The first adjacent violation in `witness`, as the atom refuting it.
///
/// At layer 0 only `f1` is checked. At layer 1 an `f1` violation yields the
/// fact `(0, n_i, n_i+1)` and an `f2`-only violation yields the hypothesis
/// `(1, n_i, n_i+1)`.
pub fn counterexample(f1: &FnTable, f2: Option<&FnTable>, layer: Layer, witness: &Witness) -> AtomSet {
    for pair in witness.0.windows(2) {
        let (n, m) = (pair[0], pair[1]);
        if f1.eval(n) > f1.eval(m) {
            return AtomSet::from([minima_atom(0, n, m)]);
        }
        if layer == 1 {
            if let Some(f2) = f2 {
                if f2.eval(n) > f2.eval(m) {
                    return AtomSet::from([minima_atom(1, n, m)]);
                }
            }
        }
    }
    AtomSet::new()
}

/// Strictly increasing, of length `k`, and weakly increasing under each
/// given function.
pub fn is_monotone_witness(witness: &Witness, k: usize, functions: &[&FnTable]) -> bool {
    witness.0.len() == k
        && witness.0.windows(2).all(|p| {
            p[0] < p[1] && functions.iter().all(|f| f.eval(p[0]) <= f.eval(p[1]))
        })
}

/// Structure, problem and realizer for one instance of the example family.
#[derive(Clone, Debug)]
pub struct MinimaSetup {
    pub structure: Arc<MinimaStructure>,
    pub problem: Problem,
    pub realizer: Realizer,
    pub layer: Layer,
    pub k: usize,
}

impl MinimaSetup {
    pub fn witness(&self, state: &KnowledgeState) -> Witness {
        self.problem.solution(state)
    }
}

/// Without `f2`: length-`k` increasing tuples weakly increasing under `f1`,
/// solved by reading the first `k` believed `f1`-minima. With `f2`: the
/// tuple must also be weakly increasing under `f2`, and the solution reads
/// the first `k` believed minima of the second layer.
pub fn example_problem(f1: FnTable, f2: Option<FnTable>, k: usize) -> MinimaSetup {
    assert!(k >= 1, "witness length must be at least 1");
    let structure = Arc::new(MinimaStructure::new(f1.clone(), f2.clone()));
    let layer: Layer = if f2.is_some() { 1 } else { 0 };

    let (pf1, pf2) = (f1.clone(), f2.clone());
    let description = match &f2 {
        None => format!("P1(k={k})"),
        Some(_) => format!("P2(k={k})"),
    };
    let problem = Problem::new(
        description,
        move |w| match &pf2 {
            None => is_monotone_witness(w, k, &[&pf1]),
            Some(g) => is_monotone_witness(w, k, &[&pf1, g]),
        },
        move |s| alpha(s, layer, k),
    );

    let realizer = wrap(structure.clone(), move |s: &KnowledgeState| {
        Ok(counterexample(&f1, f2.as_ref(), layer, &alpha(s, layer, k)))
    });
    MinimaSetup {
        structure,
        problem,
        realizer,
        layer,
        k,
    }
}
