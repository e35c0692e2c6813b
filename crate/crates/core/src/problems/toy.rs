//! Small finite structures described by tables.
//!
//! Question `i` of a [`ToyStructure`] has identity `(0, i)`. Each answer has
//! a payload and a [`Rule`] deciding its truth; rules of hypotheses may only
//! mention fact questions. Atoms are enumerated question by question, answers
//! in table order.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knowledge::{Atom, KnowledgeState, LayeredStructure, Level, QuestionId, StateView};
use crate::semantics::{Problem, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Always,
    Never,
    /// True iff the given question has some answer.
    Answered(QuestionId),
    /// True iff the given question has no answer.
    Unanswered(QuestionId),
    /// True iff the given question is answered with this payload.
    AnsweredWith(QuestionId, u64),
}

impl Rule {
    fn mentions(&self) -> Option<QuestionId> {
        match *self {
            Rule::Always | Rule::Never => None,
            Rule::Answered(q) | Rule::Unanswered(q) | Rule::AnsweredWith(q, _) => Some(q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyAnswer {
    pub payload: u64,
    pub rule: Rule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyQuestion {
    pub level: Level,
    pub answers: Vec<ToyAnswer>,
}

#[derive(Clone, Debug)]
pub struct ToyStructure {
    name: String,
    questions: Vec<ToyQuestion>,
    atoms: Vec<Atom>,
}

pub fn toy_question(i: usize) -> QuestionId {
    QuestionId::new(0, i as u64)
}

impl ToyStructure {
    /// Fails if a rule mentions an unknown question or one whose level is not
    /// strictly below the answer's level, or if payloads repeat within a
    /// question.
    pub fn new(name: impl Into<String>, questions: Vec<ToyQuestion>) -> Result<Self> {
        let mut atoms = Vec::new();
        for (i, q) in questions.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for answer in &q.answers {
                if !seen.insert(answer.payload) {
                    return Err(Error::InvalidArgument(format!(
                        "question {i} repeats payload {}",
                        answer.payload
                    )));
                }
                if let Some(dep) = answer.rule.mentions() {
                    let dep_level = questions
                        .get(dep.key as usize)
                        .filter(|_| dep.family == 0)
                        .map(|d| d.level)
                        .ok_or(Error::UnknownQuestion(dep))?;
                    if dep_level >= q.level {
                        return Err(Error::InvalidArgument(format!(
                            "answer {} of question {i} (level {}) depends on {dep} at level {dep_level}",
                            answer.payload, q.level
                        )));
                    }
                }
                atoms.push(Atom::new(toy_question(i), answer.payload, q.level));
            }
        }
        Ok(ToyStructure {
            name: name.into(),
            questions,
            atoms,
        })
    }

    pub fn questions(&self) -> &[ToyQuestion] {
        &self.questions
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    fn rule_of(&self, atom: &Atom) -> Option<Rule> {
        self.questions
            .get(atom.question.key as usize)?
            .answers
            .iter()
            .find(|a| a.payload == atom.payload)
            .map(|a| a.rule)
    }
}

impl LayeredStructure for ToyStructure {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn max_level(&self) -> Level {
        self.questions.iter().map(|q| q.level).max().unwrap_or_default()
    }

    fn atom_at(&self, index: usize) -> Option<Atom> {
        self.atoms.get(index).copied()
    }

    fn index_of(&self, atom: &Atom) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    fn question_level(&self, question: QuestionId) -> Option<Level> {
        if question.family != 0 {
            return None;
        }
        self.questions.get(question.key as usize).map(|q| q.level)
    }

    fn truth(&self, atom: &Atom, view: &StateView<'_>) -> Result<bool> {
        let rule = self.rule_of(atom).ok_or(Error::UnknownAtom(*atom))?;
        Ok(match rule {
            Rule::Always => true,
            Rule::Never => false,
            Rule::Answered(q) => view.query(q)?.is_some(),
            Rule::Unanswered(q) => view.query(q)?.is_none(),
            Rule::AnsweredWith(q, p) => view.query(q)?.is_some_and(|a| a.payload == p),
        })
    }
}

/// Code of the answer to `question`: payload + 1, or 0 when unanswered.
pub fn answer_code(state: &KnowledgeState, question: QuestionId) -> u64 {
    state.query(question).map_or(0, |a| a.payload + 1)
}

/// The problem whose witness lists the answer codes of `watched`, accepted
/// iff it is one of `accepted`.
pub fn watch_problem(watched: Vec<QuestionId>, accepted: BTreeSet<Witness>) -> Problem {
    let description = format!(
        "watch[{}] in {} accepted tuples",
        watched.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(","),
        accepted.len()
    );
    Problem::new(
        description,
        move |w| accepted.contains(w),
        move |s| Witness(watched.iter().map(|q| answer_code(s, *q)).collect()),
    )
}

/// Random toy with at most `max_atoms` atoms over two levels. Question 0 is
/// always a fact.
pub fn random_toy(seed: u64, max_atoms: usize) -> Arc<ToyStructure> {
    assert!(max_atoms >= 5, "random toys need room for five questions");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_questions = rng.gen_range(3..=5usize);
    let mut questions: Vec<ToyQuestion> = Vec::new();
    let mut budget = max_atoms;
    for i in 0..n_questions {
        let remaining = n_questions - i - 1;
        let most = (budget - remaining).clamp(1, 3);
        let n_answers = rng.gen_range(1..=most);
        budget -= n_answers;
        let level = if i == 0 || rng.gen_bool(0.4) { Level::FACT } else { Level::HYPOTHESIS };
        let facts: Vec<usize> = (0..questions.len())
            .filter(|&j| questions[j].level == Level::FACT)
            .collect();
        let answers = (0..n_answers as u64)
            .map(|payload| {
                let rule = if level == Level::FACT {
                    if rng.gen_bool(0.6) { Rule::Always } else { Rule::Never }
                } else {
                    let dep = facts[rng.gen_range(0..facts.len())];
                    let q = toy_question(dep);
                    match rng.gen_range(0..5) {
                        0 => Rule::Always,
                        1 => Rule::Never,
                        2 => Rule::Answered(q),
                        3 => Rule::Unanswered(q),
                        _ => {
                            let options = questions[dep].answers.len() as u64;
                            Rule::AnsweredWith(q, rng.gen_range(0..options))
                        }
                    }
                };
                ToyAnswer { payload, rule }
            })
            .collect();
        questions.push(ToyQuestion { level, answers });
    }
    Arc::new(ToyStructure::new(format!("toy-{seed}"), questions).expect("generated toys are well formed"))
}
