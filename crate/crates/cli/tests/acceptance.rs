//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use kspace_cli::VerifyReport;
use kspace_core::operators::check_realizer_laws;
use kspace_core::problems::minima::{example_problem, minima_atom, MinimaStructure};
use kspace_core::problems::relay::{self, relay_setup};
use kspace_core::problems::toy::{random_toy, toy_question, watch_problem, ToyStructure};
use kspace_core::problems::{FnTable, Tail};
use kspace_core::semantics::{brute_force_sound_zeros, window_models, DEFAULT_ENUMERATION_CAP};
use kspace_core::{
    derive_realizer, eval_truth, find_sound_zero, guard_stats, is_sound, is_zero, naive_learn, wrap, Atom, AtomSet,
    KnowledgeState, LayeredStructure, LearnerConfig, Level, Outcome, Problem, QuestionWindow, Realizer, Run,
    Witness,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP_CAP: usize = 100_000;
const NAIVE_CAP: usize = 1_000;
const FUZZ_PROBES: usize = 10_000;
const TABLES: usize = 24;
const TOYS: usize = 12;
const TOY_ATOMS: usize = 12;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    check: fn() -> Result<String, String>,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table(s: &str) -> FnTable {
    s.parse().unwrap()
}

/// Hand-picked tables followed by seeded random ones, half with constant and
/// half with periodic tails.
fn corpus(seed: u64) -> Vec<FnTable> {
    let mut tables: Vec<FnTable> = [
        "2,1,0;const 2",
        "10,30,20;const 20",
        "20,10,20;const 20",
        "5,4,3,2,1,0;const 0",
        "0,1,2,3;period 1",
        "9,5,3,8;period 2",
        "3,1,4,1,5,9,2,6;period 3",
        "7;const 7",
    ]
    .iter()
    .map(|s| table(s))
    .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while tables.len() < TABLES {
        let len = rng.gen_range(1..8);
        let prefix: Vec<u64> = (0..len).map(|_| rng.gen_range(0..10)).collect();
        let tail = if tables.len().is_multiple_of(2) {
            Tail::Const(rng.gen_range(0..10))
        } else {
            Tail::Period(rng.gen_range(1..=len))
        };
        tables.push(FnTable::new(prefix, tail).unwrap());
    }
    tables
}

fn learn(realizer: &Realizer) -> Result<Run, String> {
    let config = LearnerConfig::default().with_step_cap(STEP_CAP);
    find_sound_zero(realizer, &KnowledgeState::empty(), &config).map_err(|e| e.to_string())
}

fn cli_verify(state: &str) -> Result<VerifyReport, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_kspace"))
        .args(["verify", "--problem", "p1", "--f1", "2,1,0;const 2", "--window", "10", "--state", state])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("verify exited with {:?}", out.status.code()))?;
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn worked_examples() -> Result<String, String> {
    for state in ["[[0,0,1],[0,1,2]]", "[[0,0,2],[0,1,2]]"] {
        let r = cli_verify(state)?;
        ensure(r.sound && r.complete && r.model, || format!("{state} is not a model: {r:?}"))?;
    }
    let chain = cli_verify("[[0,0,1],[0,1,2],[0,2,3],[0,3,4]]")?;
    ensure(chain.complete && !chain.sound, || format!("chain: {chain:?}"))?;
    let s = MinimaStructure::new(table("10,30,20;const 20"), Some(table("20,10,20;const 20")));
    let x = minima_atom(1, 0, 1);
    let alone = KnowledgeState::from_atoms([x]).unwrap();
    let with_y = KnowledgeState::from_atoms([x, minima_atom(0, 1, 2)]).unwrap();
    let (a, b) = (eval_truth(&s, &x, &alone).unwrap(), eval_truth(&s, &x, &with_y).unwrap());
    ensure(a && !b, || format!("truth flip gave {a}, {b}"))?;
    Ok("2 models, 1 complete-unsound chain, truth flip true -> false".into())
}

fn check_trace(run: &Run, structure: &dyn LayeredStructure) -> Result<(), String> {
    let mut facts = KnowledgeState::empty();
    for t in &run.trace {
        ensure(is_sound(structure, &t.state_after).unwrap(), || format!("unsound after step {}", t.step))?;
        let now = t.state_after.restrict(Level::HYPOTHESIS);
        ensure(facts.is_subset(&now), || format!("facts shrank at step {}", t.step))?;
        facts = now;
    }
    Ok(())
}

fn minima_learning(two_levels: bool, ks: std::ops::RangeInclusive<usize>) -> Result<String, String> {
    let f1s = corpus(1);
    let f2s = corpus(2);
    let mut runs = 0;
    let mut max_steps = 0;
    for (i, f1) in f1s.iter().enumerate() {
        for k in ks.clone() {
            let f2 = two_levels.then(|| f2s[(i + 7) % f2s.len()].clone());
            let setup = example_problem(f1.clone(), f2.clone(), k);
            let run = learn(&setup.realizer).map_err(|e| format!("f1={f1} k={k}: {e}"))?;
            let s = &*setup.structure;
            let tag = || format!("f1={f1} f2={f2:?} k={k}");
            ensure(run.outcome == Outcome::Zero, || format!("{}: no zero", tag()))?;
            ensure(is_sound(s, &run.final_state).unwrap(), || format!("{}: unsound", tag()))?;
            ensure(is_zero(&setup.realizer, &run.final_state).unwrap(), || format!("{}: not a zero", tag()))?;
            let w = setup.witness(&run.final_state);
            ensure(setup.problem.contains(&w), || format!("{}: witness {w} rejected", tag()))?;
            if two_levels {
                check_trace(&run, s).map_err(|e| format!("{}: {e}", tag()))?;
            }
            runs += 1;
            max_steps = max_steps.max(run.steps());
        }
    }
    Ok(format!("{} tables, {runs} runs, max {max_steps} steps (cap {STEP_CAP})", f1s.len()))
}

struct ToyCase {
    seed: u64,
    toy: Arc<ToyStructure>,
    window: QuestionWindow,
    problem: Problem,
    realizer: Realizer,
}

/// Toys whose problem accepts exactly the watched answers of the window
/// models, so every model satisfies it by construction.
fn toy_cases() -> Vec<ToyCase> {
    (0..TOYS as u64)
        .map(|seed| {
            let toy = random_toy(seed, TOY_ATOMS);
            let window = QuestionWindow::full(&*toy, TOY_ATOMS).unwrap();
            let watched: Vec<_> = (0..toy.questions().len())
                .filter(|i| *i == 0 || (seed >> i) & 1 == 1)
                .map(toy_question)
                .collect();
            let probe = watch_problem(watched.clone(), BTreeSet::new());
            let accepted: BTreeSet<Witness> = window_models(&*toy, &window, DEFAULT_ENUMERATION_CAP)
                .unwrap()
                .iter()
                .map(|m| probe.solution(m))
                .collect();
            let problem = watch_problem(watched, accepted);
            let realizer = derive_realizer(toy.clone(), problem.clone(), toy.atoms().len());
            ToyCase {
                seed,
                toy,
                window,
                problem,
                realizer,
            }
        })
        .collect()
}

fn completeness() -> Result<String, String> {
    let mut zeros_seen = 0;
    let mut models_seen = 0;
    for case in toy_cases() {
        let s = &*case.toy;
        ensure(s.atoms().len() <= TOY_ATOMS, || format!("toy {} too large", case.seed))?;
        let models = window_models(s, &case.window, DEFAULT_ENUMERATION_CAP).unwrap();
        for m in &models {
            ensure(case.problem.solved_at(m), || format!("toy {}: model {m} outside P", case.seed))?;
            ensure(is_zero(&case.realizer, m).unwrap(), || format!("toy {}: model {m} not a zero", case.seed))?;
        }
        let zeros = brute_force_sound_zeros(s, &case.window, &case.realizer, usize::MAX).unwrap();
        for z in &zeros {
            ensure(case.problem.solved_at(z), || format!("toy {}: zero {z} outside P", case.seed))?;
        }
        zeros_seen += zeros.len();
        models_seen += models.len();
    }
    Ok(format!("{TOYS} toys, {models_seen} models, {zeros_seen} sound zeros, all in P"))
}

fn realizer_laws() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tables = corpus(3);
    let mut atoms_checked = 0;
    for probe in 0..FUZZ_PROBES {
        let structure: Arc<dyn LayeredStructure> = if probe % 3 == 0 {
            random_toy(rng.gen(), TOY_ATOMS)
        } else {
            let f1 = tables[rng.gen_range(0..tables.len())].clone();
            let f2 = rng.gen_bool(0.5).then(|| tables[rng.gen_range(0..tables.len())].clone());
            Arc::new(MinimaStructure::new(f1, f2))
        };
        let candidates: Vec<Atom> = (0..40).filter_map(|i| structure.atom_at(i)).collect();
        let mut state = KnowledgeState::empty();
        for _ in 0..rng.gen_range(0..8) {
            let a = candidates[rng.gen_range(0..candidates.len())];
            if !state.is_answered(a.question) {
                state = state.add_answer(a).unwrap();
            }
        }
        let raw: AtomSet = (0..rng.gen_range(0..10))
            .map(|_| candidates[rng.gen_range(0..candidates.len())])
            .collect();
        let r = wrap(structure.clone(), move |_: &KnowledgeState| Ok(raw.clone()));
        let report = check_realizer_laws(&*structure, &r, &state).map_err(|e| e.to_string())?;
        ensure(report.passed(), || format!("probe {probe}: {:?}", report.failures().collect::<Vec<_>>()))?;
        atoms_checked += report.verdicts.len();
    }
    let stats = guard_stats();
    ensure(stats.violations == 0, || format!("{} layer violations", stats.violations))?;
    Ok(format!(
        "{FUZZ_PROBES} probes, {atoms_checked} output atoms lawful; {} evaluations, 0 violations",
        stats.evaluations
    ))
}

fn naive_contrast() -> Result<String, String> {
    let config = LearnerConfig::default();
    let mut agreed = 0;
    for f1 in corpus(1) {
        for k in 1..=6 {
            let setup = example_problem(f1.clone(), None, k);
            let fsz = find_sound_zero(&setup.realizer, &KnowledgeState::empty(), &config).map_err(|e| e.to_string())?;
            let naive = naive_learn(&setup.realizer, &KnowledgeState::empty(), &config).map_err(|e| e.to_string())?;
            ensure(naive.final_state == fsz.final_state, || format!("f1={f1} k={k}: final states differ"))?;
            agreed += 1;
        }
    }
    let setup = relay_setup();
    let capped = LearnerConfig::default().with_step_cap(NAIVE_CAP);
    let naive = naive_learn(&setup.realizer, &KnowledgeState::empty(), &capped).map_err(|e| e.to_string())?;
    ensure(naive.outcome == Outcome::StepCapExceeded, || {
        format!("naive learner stopped after {} steps", naive.steps())
    })?;
    let fsz = find_sound_zero(&setup.realizer, &KnowledgeState::empty(), &capped).map_err(|e| e.to_string())?;
    ensure(fsz.final_state == KnowledgeState::from_atoms([relay::fact(0)]).unwrap(), || {
        format!("relay final state {}", fsz.final_state)
    })?;
    Ok(format!(
        "{agreed} one-level runs agree; relay: naive capped at {NAIVE_CAP}, timestamped zero after {} steps",
        fsz.steps()
    ))
}

fn oracle_agreement() -> Result<String, String> {
    let mut checked = 0;
    for case in toy_cases() {
        let run = learn(&case.realizer)?;
        let zeros = brute_force_sound_zeros(&*case.toy, &case.window, &case.realizer, usize::MAX).unwrap();
        ensure(zeros.contains(&run.final_state), || {
            format!("toy {}: learned {} not among {} zeros", case.seed, run.final_state, zeros.len())
        })?;
        checked += 1;
    }
    Ok(format!("{checked} toys: learned state found by exhaustive search"))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "worked-example fixtures",
            budget: Some(Duration::from_secs(1)),
            check: worked_examples,
        },
        Criterion {
            id: 2,
            name: "monotonic learning, k in 1..=6",
            budget: Some(Duration::from_secs(10)),
            check: || minima_learning(false, 1..=6),
        },
        Criterion {
            id: 3,
            name: "non-monotonic learning, k in 1..=5",
            budget: Some(Duration::from_secs(30)),
            check: || minima_learning(true, 1..=5),
        },
        Criterion {
            id: 4,
            name: "completeness construction on toys",
            budget: Some(Duration::from_secs(10)),
            check: completeness,
        },
        Criterion {
            id: 5,
            name: "realizer laws and layer guard",
            budget: None,
            check: realizer_laws,
        },
        Criterion {
            id: 6,
            name: "naive learner contrast",
            budget: Some(Duration::from_secs(5)),
            check: naive_contrast,
        },
        Criterion {
            id: 7,
            name: "oracle agreement",
            budget: None,
            check: oracle_agreement,
        },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let started = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.check))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        let elapsed = started.elapsed();
        let result = match (result, c.budget) {
            (Ok(_), Some(budget)) if elapsed > budget => {
                Err(format!("took {elapsed:.2?}, budget {budget:.2?}"))
            }
            (r, _) => r,
        };
        let budget = c.budget.map_or(String::new(), |b| format!(" < {b:.0?}"));
        match result {
            Ok(detail) => println!("criterion {} {}: PASS ({elapsed:.2?}{budget}) {detail}", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {}: FAIL ({elapsed:.2?}{budget}) {detail}", c.id, c.name);
            }
        }
    }
    let violations = guard_stats().violations;
    if violations != 0 {
        failed += 1;
        println!("layer guard: FAIL ({violations} violations over the whole suite)");
    }
    println!("{} of {} criteria passed", criteria.len() - failed.min(criteria.len()), criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
