#![allow(dead_code)]

use std::sync::Arc;

use kspace_core::problems::minima::MinimaStructure;
use kspace_core::problems::toy::random_toy;
use kspace_core::problems::{FnTable, Tail};
use kspace_core::semantics::QuestionWindow;
use kspace_core::{Atom, KnowledgeState, LayeredStructure, Level};
use proptest::prelude::*;

pub fn fn_table() -> impl Strategy<Value = FnTable> {
    prop::collection::vec(0u64..6, 1..6).prop_flat_map(|prefix| {
        let len = prefix.len();
        let tail = prop_oneof![(0u64..6).prop_map(Tail::Const), (1..=len).prop_map(Tail::Period)];
        tail.prop_map(move |t| FnTable::new(prefix.clone(), t).unwrap())
    })
}

/// A structure together with a finite window over it.
#[derive(Clone)]
pub struct Probe {
    pub structure: Arc<dyn LayeredStructure>,
    pub window: QuestionWindow,
}

impl std::fmt::Debug for Probe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.structure.name())
    }
}

impl Probe {
    pub fn candidates(&self) -> Vec<Atom> {
        self.window.candidates(&*self.structure)
    }
}

pub fn minima_probe() -> impl Strategy<Value = Probe> {
    (fn_table(), prop::option::of(fn_table()), 2u64..7).prop_map(|(f1, f2, bound)| {
        let s = MinimaStructure::new(f1, f2);
        let window = s.window(bound);
        Probe {
            structure: Arc::new(s),
            window,
        }
    })
}

pub fn toy_probe() -> impl Strategy<Value = Probe> {
    any::<u64>().prop_map(|seed| {
        let s = random_toy(seed, 12);
        let window = QuestionWindow::full(&*s, 12).unwrap();
        Probe {
            structure: s,
            window,
        }
    })
}

pub fn any_probe() -> impl Strategy<Value = Probe> {
    prop_oneof![minima_probe(), toy_probe()]
}

/// Greedily adds the picked candidates whose question is still open.
pub fn state_from(candidates: &[Atom], picks: &[usize]) -> KnowledgeState {
    let mut state = KnowledgeState::empty();
    if candidates.is_empty() {
        return state;
    }
    for &p in picks {
        let atom = candidates[p % candidates.len()];
        if !state.is_answered(atom.question) {
            state = state.add_answer(atom).unwrap();
        }
    }
    state
}

pub fn picks() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(any::<usize>(), 0..10)
}

/// `base` plus picked candidates at level `>= bound`.
pub fn extend_above(base: &KnowledgeState, candidates: &[Atom], picks: &[usize], bound: Level) -> KnowledgeState {
    let high: Vec<Atom> = candidates.iter().copied().filter(|a| a.level >= bound).collect();
    let mut state = base.clone();
    if high.is_empty() {
        return state;
    }
    for &p in picks {
        let atom = high[p % high.len()];
        if !state.is_answered(atom.question) {
            state = state.add_answer(atom).unwrap();
        }
    }
    state
}
