//! Run configuration: a JSON file overlaid by flags, with `DRIVELIFE_SEED`
//! as the last resort for the seed.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use drivelife::featurize::PartitionRule;
use drivelife::learners::ModelSpec;
use drivelife::Family;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::cli::{Analysis, Flags};
use crate::failure::{CliResult, Failure};

pub const SEED_ENV: &str = "DRIVELIFE_SEED";

/// A model given by name or as a full spec with hyperparameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ModelChoice {
    Name(String),
    Spec(ModelSpec),
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    input: Vec<PathBuf>,
    family: Option<Family>,
    models: Vec<String>,
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
    lookahead: Vec<u32>,
    partition: Option<String>,
    model: Option<ModelChoice>,
    folds: Option<usize>,
    undersample_ratio: Option<f64>,
    alpha: Option<f64>,
    seed: Option<u64>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    analysis: Vec<Analysis>,
    /// Overrides for the synthetic fleet; `preset` picks the base.
    synth: Option<Value>,
}

/// Everything a run depends on. Serialized, it is the config echo in every
/// artifact, and its hash identifies the run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub input: Vec<PathBuf>,
    pub family: Option<Family>,
    pub models: Vec<String>,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    pub lookahead: Vec<u32>,
    pub partition: Partition,
    pub model: ModelSpec,
    pub folds: usize,
    pub undersample_ratio: f64,
    pub alpha: f64,
    pub seed: Option<u64>,
    pub analysis: Vec<Analysis>,
    pub synth: Option<Value>,
    /// Output location and thread count do not change results.
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

fn read_config(path: &Path) -> CliResult<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
}

/// `--partition` as given: absent, explicitly `none`, or a rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Unset,
    None,
    Rule(PartitionRule),
}

fn pick_vec<T: Clone>(flag: &[T], file: Vec<T>) -> Vec<T> {
    if flag.is_empty() {
        file
    } else {
        flag.to_vec()
    }
}

fn parse_partition(s: &str) -> CliResult<Partition> {
    if s == "none" {
        return Ok(Partition::None);
    }
    Ok(Partition::Rule(s.parse()?))
}

impl RunConfig {
    pub fn resolve(command: &str, flags: &Flags, analysis: &[Analysis]) -> CliResult<Self> {
        let file = match &flags.config {
            Some(p) => read_config(p)?,
            None => ConfigFile::default(),
        };

        let model = match (&flags.model, file.model) {
            (Some(name), Some(ModelChoice::Spec(spec))) if ModelSpec::from_name(name)?.short_name() == spec.short_name() => spec,
            (Some(name), _) => ModelSpec::from_name(name)?,
            (None, Some(ModelChoice::Spec(spec))) => spec,
            (None, Some(ModelChoice::Name(name))) => ModelSpec::from_name(&name)?,
            (None, None) => ModelSpec::random_forest(),
        };
        let partition = match flags.partition.as_deref().or(file.partition.as_deref()) {
            Some(s) => parse_partition(s)?,
            None => Partition::Unset,
        };
        let seed = match flags.seed.or(file.seed) {
            Some(s) => Some(s),
            None => match std::env::var(SEED_ENV) {
                Ok(v) => Some(
                    v.trim()
                        .parse()
                        .map_err(|_| Failure::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?,
                ),
                Err(_) => None,
            },
        };
        let cfg = RunConfig {
            command: command.to_string(),
            input: pick_vec(&flags.input, file.input),
            family: flags.family.or(file.family),
            models: pick_vec(&flags.models, file.models),
            from: flags.from.or(file.from),
            to: flags.to.or(file.to),
            lookahead: pick_vec(&flags.lookahead, file.lookahead),
            partition,
            model,
            folds: flags.folds.or(file.folds).unwrap_or(5),
            undersample_ratio: file.undersample_ratio.unwrap_or(1.0),
            alpha: file.alpha.unwrap_or(0.5),
            seed,
            analysis: if analysis.is_empty() { file.analysis } else { analysis.to_vec() },
            synth: file.synth,
            out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            jobs: flags.jobs.or(file.jobs),
        };
        if let (Some(from), Some(to)) = (cfg.from, cfg.to) {
            if from > to {
                return Err(Failure::Usage(format!("--from {from} is after --to {to}")));
            }
        }
        if cfg.jobs == Some(0) {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        for p in &cfg.input {
            if !p.exists() {
                return Err(Failure::Io(format!("input {} does not exist", p.display())));
            }
        }
        Ok(cfg)
    }

    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("run config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn require_seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| {
            Failure::Usage(format!(
                "`{}` is stochastic and needs a seed: pass --seed, set it in the config or export {SEED_ENV}",
                self.command
            ))
        })
    }

    /// The one lookahead of single-evaluation subcommands.
    pub fn single_lookahead(&self) -> CliResult<u32> {
        match self.lookahead.as_slice() {
            [] => Ok(0),
            [n] => Ok(*n),
            _ => Err(Failure::Usage(format!(
                "`{}` takes a single --lookahead; use `sweep` for several",
                self.command
            ))),
        }
    }

    pub fn eval_config(&self) -> CliResult<drivelife::eval::EvalConfig> {
        Ok(drivelife::eval::EvalConfig {
            model: self.model.clone(),
            folds: self.folds,
            seed: self.require_seed()?,
            undersample_ratio: self.undersample_ratio,
            alpha: self.alpha,
        })
    }
}
