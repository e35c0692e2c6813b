//! Session configuration: an optional TOML file overridden by flags.
//!
//! ```toml
//! problem = "p2"
//! k = 3
//! f1 = "10,30,20;const 20"
//! f2 = "20,10,20;const 20"
//! policy = "random"
//! seed = 7
//! step_cap = 100000
//! window = 10
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use kspace_core::learner::DEFAULT_STEP_CAP;
use kspace_core::problems::FnTable;
use kspace_core::SelectionPolicy;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const DEFAULT_K: usize = 2;
pub const DEFAULT_WINDOW: u64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    P1,
    P2,
    Relay,
    Toy(u64),
}

impl FromStr for ProblemKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "p1" => Ok(ProblemKind::P1),
            "p2" => Ok(ProblemKind::P2),
            "relay" => Ok(ProblemKind::Relay),
            other => other
                .strip_prefix("toy-")
                .and_then(|seed| seed.parse().ok())
                .map(ProblemKind::Toy)
                .ok_or_else(|| {
                    CliError::Config(format!("unknown problem {other:?} (expected p1, p2, relay or toy-<seed>)"))
                }),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemKind::P1 => f.write_str("p1"),
            ProblemKind::P2 => f.write_str("p2"),
            ProblemKind::Relay => f.write_str("relay"),
            ProblemKind::Toy(seed) => write!(f, "toy-{seed}"),
        }
    }
}

/// Flags shared by every subcommand. Each one overrides the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct Overrides {
    /// TOML file with session settings
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// p1, p2, relay or toy-<seed>
    #[arg(long)]
    pub problem: Option<String>,
    /// Witness length
    #[arg(long)]
    pub k: Option<usize>,
    /// First function, e.g. "2,1,0;const 2" or "9,5,3,8;period 2"
    #[arg(long)]
    pub f1: Option<String>,
    /// Second function (p2 only)
    #[arg(long)]
    pub f2: Option<String>,
    /// min-index or random
    #[arg(long)]
    pub policy: Option<String>,
    /// Seed of the random policy
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub step_cap: Option<usize>,
    /// Run the untimestamped learner instead
    #[arg(long)]
    pub naive: bool,
    /// Write the JSONL trace here instead of stdout
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Verification window: questions and answers with indices up to this bound
    #[arg(long)]
    pub window: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    problem: Option<String>,
    k: Option<usize>,
    f1: Option<String>,
    f2: Option<String>,
    policy: Option<String>,
    seed: Option<u64>,
    step_cap: Option<usize>,
    naive: Option<bool>,
    trace_out: Option<PathBuf>,
    window: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionConfig {
    pub problem: ProblemKind,
    pub k: usize,
    pub f1: Option<FnTable>,
    pub f2: Option<FnTable>,
    pub policy: SelectionPolicy,
    pub step_cap: usize,
    pub naive: bool,
    pub trace_out: Option<PathBuf>,
    pub window: u64,
}

impl SessionConfig {
    pub fn from_toml(text: &str, overrides: &Overrides) -> CliResult<Self> {
        let file: FileConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::merge(file, overrides)
    }

    pub fn resolve(overrides: &Overrides) -> CliResult<Self> {
        match &overrides.config {
            Some(path) => Self::load(path, overrides),
            None => Self::merge(FileConfig::default(), overrides),
        }
    }

    pub fn load(path: &Path, overrides: &Overrides) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text, overrides)
    }

    fn merge(file: FileConfig, o: &Overrides) -> CliResult<Self> {
        let problem: ProblemKind = o
            .problem
            .clone()
            .or(file.problem)
            .ok_or_else(|| CliError::Config("no problem given".into()))?
            .parse()?;
        let k = o.k.or(file.k).unwrap_or(DEFAULT_K);
        let f1 = o.f1.clone().or(file.f1).map(|s| parse_table("f1", &s)).transpose()?;
        let f2 = o.f2.clone().or(file.f2).map(|s| parse_table("f2", &s)).transpose()?;
        let seed = o.seed.or(file.seed).unwrap_or(0);
        let policy = match o.policy.clone().or(file.policy).as_deref() {
            None | Some("min-index") => SelectionPolicy::MinIndex,
            Some("random") => SelectionPolicy::Random { seed },
            Some(other) => {
                return Err(CliError::Config(format!("unknown policy {other:?} (expected min-index or random)")))
            }
        };
        let config = SessionConfig {
            problem,
            k,
            f1,
            f2,
            policy,
            step_cap: o.step_cap.or(file.step_cap).unwrap_or(DEFAULT_STEP_CAP),
            naive: o.naive || file.naive.unwrap_or(false),
            trace_out: o.trace_out.clone().or(file.trace_out),
            window: o.window.or(file.window).unwrap_or(DEFAULT_WINDOW),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> CliResult<()> {
        let needs = |cond: bool, msg: &str| if cond { Ok(()) } else { Err(CliError::Config(msg.into())) };
        match self.problem {
            ProblemKind::P1 => {
                needs(self.f1.is_some(), "p1 needs f1")?;
                needs(self.f2.is_none(), "f2 is only meaningful for p2")?;
            }
            ProblemKind::P2 => {
                needs(self.f1.is_some(), "p2 needs f1")?;
                needs(self.f2.is_some(), "p2 needs f2")?;
            }
            ProblemKind::Relay | ProblemKind::Toy(_) => {
                needs(self.f1.is_none() && self.f2.is_none(), "relay and toy problems take no functions")?;
            }
        }
        needs(self.k >= 1, "k must be at least 1")?;
        needs(self.window >= 1, "window must be at least 1")
    }
}

fn parse_table(name: &str, text: &str) -> CliResult<FnTable> {
    text.parse()
        .map_err(|e: kspace_core::Error| CliError::Config(format!("{name}: {e}")))
}
