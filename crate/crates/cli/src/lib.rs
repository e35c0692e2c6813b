//! Command-line front end: runs learning sessions from configuration files
//! and flags, writes JSONL traces, verifies states and replays traces.

pub mod config;
pub mod error;
pub mod instance;
pub mod session;
pub mod verify;
pub mod wire;

pub use config::{Overrides, ProblemKind, SessionConfig};
pub use error::{exit, CliError, CliResult};
pub use session::{replay, run_batch, run_session, SessionReport};
pub use verify::{verify, VerifyReport};
