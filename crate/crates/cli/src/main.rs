use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kspace_cli::session::run_batch;
use kspace_cli::verify::parse_triples;
use kspace_cli::{exit, replay, run_session, verify, CliError, CliResult, Overrides, SessionConfig};

#[derive(Parser)]
#[command(name = "kspace", version, about = "Learn sound zeros of realizers on layered knowledge spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one learning session and emit its JSONL trace
    Run {
        #[command(flatten)]
        session: Overrides,
    },
    /// Check a state for soundness, completeness on the window, and zero-ness
    Verify {
        #[command(flatten)]
        session: Overrides,
        /// JSON list of atoms, e.g. '[[0,0,1],[0,1,2]]'
        #[arg(long)]
        state: String,
    },
    /// Re-execute a recorded trace and compare every step
    Replay {
        #[command(flatten)]
        session: Overrides,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Run several config files concurrently
    Batch {
        /// Config files
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Worker threads; defaults to the available parallelism
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn run(session: &Overrides) -> CliResult<i32> {
    let config = SessionConfig::resolve(session)?;
    let report = match &config.trace_out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            })?;
            let report = run_session(&config, &mut BufWriter::new(file))?;
            println!("{}", report.describe());
            report
        }
        None => {
            let report = run_session(&config, &mut io::stdout().lock())?;
            eprintln!("{}", report.describe());
            report
        }
    };
    Ok(report.exit_code)
}

fn dispatch(command: Command) -> CliResult<i32> {
    match command {
        Command::Run { session } => run(&session),
        Command::Verify { session, state } => {
            let config = SessionConfig::resolve(&session)?;
            let report = verify(&config, &parse_triples(&state)?)?;
            println!("{}", serde_json::to_string(&report).expect("reports serialize"));
            Ok(exit::OK)
        }
        Command::Replay { session, trace } => {
            let config = SessionConfig::resolve(&session)?;
            let text = std::fs::read_to_string(&trace).map_err(|e| CliError::Io {
                path: trace.clone(),
                source: e,
            })?;
            let report = replay(&config, &text)?;
            let state: Vec<String> = report.final_state.iter().map(|t| format!("{t:?}")).collect();
            println!("replayed {} steps; final state [{}]", report.steps, state.join(", "));
            Ok(exit::OK)
        }
        Command::Batch { configs, out_dir, jobs } => {
            std::fs::create_dir_all(&out_dir).map_err(|e| CliError::Io {
                path: out_dir.clone(),
                source: e,
            })?;
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let items = run_batch(&configs, &out_dir, jobs, &Overrides::default());
            let mut stdout = io::stdout().lock();
            for item in &items {
                let line = match &item.result {
                    Ok(report) => report.describe(),
                    Err(e) => e.to_string(),
                };
                let _ = writeln!(stdout, "{}\t{}\t{}", item.exit_code(), item.config.display(), line);
            }
            Ok(items.iter().map(|i| i.exit_code()).max().unwrap_or(exit::OK))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(exit::CONFIG as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let code = dispatch(cli.command).unwrap_or_else(|e| {
        eprintln!("kspace: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
