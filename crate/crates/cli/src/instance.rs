//! Structures, problems and realizers built from a session configuration.

use std::collections::BTreeSet;
use std::sync::Arc;

use kspace_core::problems::minima::example_problem;
use kspace_core::problems::relay::{self, relay_setup};
use kspace_core::problems::toy::{random_toy, toy_question, watch_problem};
use kspace_core::semantics::{window_models, DEFAULT_ENUMERATION_CAP};
use kspace_core::{
    derive_realizer, Atom, KnowledgeState, LayeredStructure, LearnerConfig, Problem, QuestionWindow, Realizer, Witness,
};

use crate::config::{ProblemKind, SessionConfig};
use crate::error::{CliError, CliResult};

/// Atom budget of generated toy structures.
pub const TOY_ATOMS: usize = 12;

#[derive(Clone)]
pub struct Instance {
    pub structure: Arc<dyn LayeredStructure>,
    pub problem: Problem,
    pub realizer: Realizer,
    pub window: QuestionWindow,
}

impl std::fmt::Debug for Instance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Instance")
            .field("structure", &self.structure.name())
            .field("problem", &self.problem)
            .finish_non_exhaustive()
    }
}

impl Instance {
    pub fn build(config: &SessionConfig) -> CliResult<Self> {
        match config.problem {
            ProblemKind::P1 | ProblemKind::P2 => {
                let f1 = config.f1.clone().ok_or_else(|| CliError::Config("missing f1".into()))?;
                let setup = example_problem(f1, config.f2.clone(), config.k);
                Ok(Instance {
                    window: setup.structure.window(config.window),
                    structure: setup.structure,
                    problem: setup.problem,
                    realizer: setup.realizer,
                })
            }
            ProblemKind::Relay => {
                let setup = relay_setup();
                let facts = (0..=config.window).map(|i| relay::fact(i).question);
                let questions = facts.chain([relay::HYPOTHESIS_A, relay::HYPOTHESIS_B]);
                let window = QuestionWindow::new(questions, 3 * (config.window as usize + 1))?;
                Ok(Instance {
                    structure: setup.structure,
                    problem: setup.problem,
                    realizer: setup.realizer,
                    window,
                })
            }
            ProblemKind::Toy(seed) => {
                let toy = random_toy(seed, TOY_ATOMS);
                let window = QuestionWindow::full(&*toy, TOY_ATOMS)?;
                let watched: Vec<_> = (0..toy.questions().len()).map(toy_question).collect();
                let probe = watch_problem(watched.clone(), BTreeSet::new());
                let accepted: BTreeSet<Witness> = window_models(&*toy, &window, DEFAULT_ENUMERATION_CAP)?
                    .iter()
                    .map(|m| probe.solution(m))
                    .collect();
                let problem = watch_problem(watched, accepted);
                let realizer = derive_realizer(toy.clone(), problem.clone(), toy.atoms().len());
                Ok(Instance {
                    structure: toy,
                    problem,
                    realizer,
                    window,
                })
            }
        }
    }

    /// Atoms sorted by enumeration index.
    pub fn canonical(&self, atoms: impl IntoIterator<Item = Atom>) -> Vec<Atom> {
        let mut atoms: Vec<Atom> = atoms.into_iter().collect();
        atoms.sort_by_key(|a| (self.structure.index_of(a), *a));
        atoms
    }

    pub fn sorted_state(&self, state: &KnowledgeState) -> Vec<Atom> {
        self.canonical(state.atoms().copied())
    }

    pub fn parse_atom(&self, triple: [u64; 3]) -> CliResult<Atom> {
        Atom::from_triple(&*self.structure, triple).map_err(|e| CliError::Config(format!("atom {triple:?}: {e}")))
    }

    pub fn parse_state(&self, triples: &[[u64; 3]]) -> CliResult<KnowledgeState> {
        let atoms = triples.iter().map(|t| self.parse_atom(*t)).collect::<CliResult<Vec<_>>>()?;
        KnowledgeState::from_atoms(atoms).map_err(|e| CliError::Config(e.to_string()))
    }
}

pub fn learner_config(config: &SessionConfig) -> LearnerConfig {
    LearnerConfig::default()
        .with_policy(config.policy)
        .with_step_cap(config.step_cap)
}
