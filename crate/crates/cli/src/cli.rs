use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use drivelife::Family;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "drivelife", version, about = "Drive-fleet lifecycle, characterization and failure-prediction runs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse raw telemetry into the canonical dataset.
    Ingest,
    /// Failures, operational periods, repair spells and their CDFs.
    Lifecycle,
    /// Correlations, failure-rate curves and error statistics.
    Characterize {
        /// Comma-separated; `all` picks every analysis valid for the family.
        #[arg(long, value_delimiter = ',')]
        analysis: Vec<Analysis>,
    },
    /// Feature rows labeled for each lookahead.
    Featurize,
    /// Fit one model on the undersampled example set.
    Train,
    /// Drive-grouped cross-validation at one lookahead.
    Evaluate,
    /// Cross-validation over several lookaheads.
    Sweep,
    /// Train-model by test-model AUROC table.
    Matrix,
    /// Evaluate both sides of a partition against the unsplit model.
    PartitionEval,
    /// Generate a synthetic fleet with planted effects.
    Synth,
    /// Collate the artifacts in the output directory.
    Report,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::Lifecycle => "lifecycle",
            Command::Characterize { .. } => "characterize",
            Command::Featurize => "featurize",
            Command::Train => "train",
            Command::Evaluate => "evaluate",
            Command::Sweep => "sweep",
            Command::Matrix => "matrix",
            Command::PartitionEval => "partition-eval",
            Command::Synth => "synth",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    All,
    Correlations,
    MonthlyRate,
    PeRate,
    HfhSweep,
    Prefailure,
    Percentiles,
    WriteQuartiles,
}

impl Analysis {
    pub fn for_family(family: Family) -> Vec<Analysis> {
        match family {
            Family::Hdd => vec![Analysis::Correlations, Analysis::MonthlyRate, Analysis::HfhSweep],
            Family::Ssd => vec![
                Analysis::Correlations,
                Analysis::MonthlyRate,
                Analysis::PeRate,
                Analysis::Prefailure,
                Analysis::Percentiles,
                Analysis::WriteQuartiles,
            ],
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON run config; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Falls back to the config file, then DRIVELIFE_SEED.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true, value_parser = parse_family)]
    pub family: Option<Family>,

    /// Drive-model whitelist.
    #[arg(long, global = true, value_delimiter = ',')]
    pub models: Vec<String>,

    #[arg(long, global = true)]
    pub from: Option<NaiveDate>,

    #[arg(long, global = true)]
    pub to: Option<NaiveDate>,

    /// Lookahead days, e.g. `0,1,2,7`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub lookahead: Vec<u32>,

    /// `age:90`, `hfh:40000` or `none`.
    #[arg(long, global = true)]
    pub partition: Option<String>,

    /// `rf`, `tree` or `logreg`.
    #[arg(long, global = true)]
    pub model: Option<String>,

    #[arg(long, global = true)]
    pub folds: Option<usize>,

    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Input file or directory; repeatable.
    #[arg(long, short, global = true)]
    pub input: Vec<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: drivelife::Error| e.to_string())
}
