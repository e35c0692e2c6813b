//! Learning sessions, trace replay and batches.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use kspace_core::{eval_truth, find_sound_zero, naive_learn, Atom, Error, KnowledgeState, Run};

use crate::config::{Overrides, SessionConfig};
use crate::error::{exit, CliError, CliResult};
use crate::instance::{learner_config, Instance};
use crate::wire::{step_record, summary_record, to_line, Record, StepRecord, SummaryRecord, Triple, WireOutcome};

pub const TIMESTAMPED: &str = "timestamped";
pub const NAIVE: &str = "naive";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionReport {
    pub summary: SummaryRecord,
    pub exit_code: i32,
}

impl SessionReport {
    pub fn describe(&self) -> String {
        let s = &self.summary;
        let witness: Vec<String> = s.witness.iter().map(u64::to_string).collect();
        match s.outcome {
            WireOutcome::Zero => format!(
                "{}: {} learner reached a zero after {} steps; witness <{}> {}",
                s.problem,
                s.learner,
                s.steps,
                witness.join(","),
                if s.accepted { "accepted" } else { "REJECTED" }
            ),
            WireOutcome::StepCapExceeded => {
                format!("{}: {} learner stopped at the step cap ({} steps)", s.problem, s.learner, s.steps)
            }
        }
    }
}

fn exit_code(summary: &SummaryRecord) -> i32 {
    match (summary.outcome, summary.accepted) {
        (WireOutcome::StepCapExceeded, _) => exit::STEP_CAP,
        (WireOutcome::Zero, true) => exit::OK,
        (WireOutcome::Zero, false) => exit::REJECTED,
    }
}

pub fn learn(instance: &Instance, config: &SessionConfig) -> CliResult<Run> {
    let lc = learner_config(config);
    let start = KnowledgeState::empty();
    if config.naive {
        return Ok(naive_learn(&instance.realizer, &start, &lc)?);
    }
    match find_sound_zero(&instance.realizer, &start, &lc) {
        Ok(run) => Ok(run),
        Err(Error::StepCapExceeded { partial, .. }) => Ok(*partial),
        Err(e) => Err(e.into()),
    }
}

/// Runs one session, writing the JSONL trace and the summary line to `out`.
pub fn run_session(config: &SessionConfig, out: &mut dyn Write) -> CliResult<SessionReport> {
    let instance = Instance::build(config)?;
    let run = learn(&instance, config)?;
    let learner = if config.naive { NAIVE } else { TIMESTAMPED };
    let sink = |e| CliError::io("<trace>", e);
    for step in &run.trace {
        writeln!(out, "{}", to_line(&Record::Step(step_record(&instance, step)))).map_err(sink)?;
    }
    let summary = summary_record(&instance, &run, learner);
    writeln!(out, "{}", to_line(&Record::Summary(summary.clone()))).map_err(sink)?;
    out.flush().map_err(sink)?;
    Ok(SessionReport {
        exit_code: exit_code(&summary),
        summary,
    })
}

pub fn parse_trace(text: &str) -> CliResult<(Vec<StepRecord>, SummaryRecord)> {
    let mut steps = Vec::new();
    let mut summary = None;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let record: Record =
            serde_json::from_str(line).map_err(|e| CliError::Trace(format!("line {}: {e}", i + 1)))?;
        match (record, &summary) {
            (_, Some(_)) => return Err(CliError::Trace(format!("line {}: record after the summary", i + 1))),
            (Record::Step(s), None) => steps.push(s),
            (Record::Summary(s), None) => summary = Some(s),
        }
    }
    let summary = summary.ok_or_else(|| CliError::Trace("no summary line".into()))?;
    Ok((steps, summary))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayReport {
    pub steps: usize,
    pub final_state: Vec<Triple>,
}

/// Re-executes a trace step by step against `config`'s instance. Every
/// realizer output and every retraction is recomputed, not trusted.
pub fn replay(config: &SessionConfig, text: &str) -> CliResult<ReplayReport> {
    let instance = Instance::build(config)?;
    let (steps, summary) = parse_trace(text)?;
    let s = &*instance.structure;
    let naive = summary.learner == NAIVE;
    let parse_atoms = |ts: &[Triple]| ts.iter().map(|t| instance.parse_atom(*t)).collect::<CliResult<Vec<Atom>>>();

    let mut state = instance.parse_state(&summary.start)?;
    let mut stamps: BTreeMap<Atom, usize> = state.atoms().map(|a| (*a, 0)).collect();
    for (i, record) in steps.iter().enumerate() {
        let mismatch = |detail: String| CliError::ReplayMismatch { step: i, detail };
        if record.step != i {
            return Err(mismatch(format!("record numbered {}", record.step)));
        }
        let output = instance.canonical(instance.realizer.apply(&state)?);
        if parse_atoms(&record.realizer_output)? != output {
            return Err(mismatch("realizer output differs".into()));
        }
        let chosen = instance.parse_atom(record.chosen)?;
        if !output.contains(&chosen) {
            return Err(mismatch(format!("{chosen} is not a realizer output")));
        }
        let extended = state.add_answer(chosen)?;
        let mut falsified = Vec::new();
        for (atom, k) in &stamps {
            if !eval_truth(s, atom, &extended)? {
                falsified.push((*atom, *k));
            }
        }
        let expected: BTreeMap<Atom, usize> = stamps
            .iter()
            .filter(|(y, m)| {
                if naive {
                    falsified.iter().any(|(z, _)| z == *y)
                } else {
                    falsified.iter().any(|(z, k)| z.level <= y.level && k <= *m)
                }
            })
            .map(|(a, k)| (*a, *k))
            .collect();
        let mut recorded = BTreeMap::new();
        for (t, k) in &record.removed {
            recorded.insert(instance.parse_atom(*t)?, *k);
        }
        if recorded != expected {
            return Err(mismatch("retracted entries differ".into()));
        }
        for atom in expected.keys() {
            stamps.remove(atom);
        }
        stamps.insert(chosen, i);
        state = KnowledgeState::from_atoms(stamps.keys().copied())?;
        if instance.sorted_state(&state) != parse_atoms(&record.state_after)? {
            return Err(mismatch("state differs".into()));
        }
    }
    let final_state: Vec<Triple> = instance.sorted_state(&state).iter().map(|a| a.triple()).collect();
    if final_state != summary.final_state || steps.len() != summary.steps {
        return Err(CliError::ReplayMismatch {
            step: steps.len(),
            detail: "final state differs from the summary".into(),
        });
    }
    Ok(ReplayReport {
        steps: steps.len(),
        final_state,
    })
}

#[derive(Debug)]
pub struct BatchItem {
    pub config: PathBuf,
    pub trace: PathBuf,
    pub result: CliResult<SessionReport>,
}

impl BatchItem {
    pub fn exit_code(&self) -> i32 {
        match &self.result {
            Ok(report) => report.exit_code,
            Err(e) => e.exit_code(),
        }
    }
}

fn batch_one(path: &Path, out_dir: &Path, overrides: &Overrides) -> (PathBuf, CliResult<SessionReport>) {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "session".into());
    let default_trace = out_dir.join(format!("{stem}.jsonl"));
    let config = match SessionConfig::load(path, overrides) {
        Ok(c) => c,
        Err(e) => return (default_trace, Err(e)),
    };
    let trace = config.trace_out.clone().unwrap_or(default_trace);
    let result = File::create(&trace)
        .map_err(|e| CliError::io(&trace, e))
        .and_then(|f| run_session(&config, &mut BufWriter::new(f)));
    (trace, result)
}

/// Runs each config file as an independent session on up to `jobs` threads.
/// Traces go to `<out_dir>/<config stem>.jsonl` unless the config names its
/// own. Items come back in input order.
pub fn run_batch(configs: &[PathBuf], out_dir: &Path, jobs: usize, overrides: &Overrides) -> Vec<BatchItem> {
    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(configs.len()));
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, configs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = configs.get(i) else { break };
                let (trace, result) = batch_one(path, out_dir, overrides);
                done.lock().unwrap().push((
                    i,
                    BatchItem {
                        config: path.clone(),
                        trace,
                        result,
                    },
                ));
            });
        }
    });
    let mut items = done.into_inner().unwrap();
    items.sort_by_key(|(i, _)| *i);
    items.into_iter().map(|(_, item)| item).collect()
}
