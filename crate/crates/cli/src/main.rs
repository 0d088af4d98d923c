//! `drivelife`: one entry point for ingest, lifecycle reconstruction,
//! characterization, featurization, training and evaluation runs.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 schema, 1 anything else. Errors
//! go to stderr as a single JSON object.

mod artifacts;
mod cli;
mod commands;
mod config;
mod data;
mod failure;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{Cli, Command};
use config::RunConfig;
use failure::{CliResult, Failure};

fn run(cli: Cli) -> CliResult<()> {
    let analysis = match &cli.command {
        Command::Characterize { analysis } => analysis.as_slice(),
        _ => &[],
    };
    let cfg = RunConfig::resolve(cli.command.name(), &cli.flags, analysis)?;
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Runtime(format!("worker pool: {e}")))?;
    }
    match cli.command {
        Command::Ingest => commands::pipeline::ingest(&cfg),
        Command::Synth => commands::pipeline::synth(&cfg),
        Command::Lifecycle => commands::lifecycle::run(&cfg),
        Command::Characterize { .. } => commands::characterize::run(&cfg),
        Command::Featurize => commands::modeling::featurize(&cfg),
        Command::Train => commands::modeling::train(&cfg),
        Command::Evaluate => commands::modeling::evaluate(&cfg),
        Command::Sweep => commands::modeling::sweep(&cfg),
        Command::Matrix => commands::modeling::matrix(&cfg),
        Command::PartitionEval => commands::modeling::partition_eval(&cfg),
        Command::Report => commands::report::run(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let f = Failure::Usage(e.render().to_string().trim().to_string());
            eprintln!("{}", f.to_json());
            return ExitCode::from(f.code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.code() as u8)
        }
    }
}
