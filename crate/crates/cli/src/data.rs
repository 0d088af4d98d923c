//! Loading the canonical dataset and building example sets from it.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use drivelife::featurize::{label_lookahead, make_features, ExampleSet, FeatureRows};
use drivelife::ingest::{filter_hdd, FleetRecords, SsdDrives};
use drivelife::lifecycle::{reconstruct, FailureEvent};
use drivelife::{Family, FleetDataset};

use crate::config::RunConfig;
use crate::failure::{CliResult, Failure};

pub const DATASET: &str = "dataset.csv";

/// Family from the first non-comment line of a CSV.
pub fn sniff_family(path: &Path) -> CliResult<Family> {
    let f = File::open(path).map_err(|e| Failure::io(path.display(), e))?;
    for line in BufReader::new(f).lines() {
        let line = line.map_err(|e| Failure::io(path.display(), e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.contains(&"drive_id") {
            return Ok(Family::Ssd);
        }
        if cols.contains(&"serial_number") || cols.contains(&"serial") {
            return Ok(Family::Hdd);
        }
        return Err(Failure::Schema(format!(
            "{}: header has neither drive_id nor serial_number",
            path.display()
        )));
    }
    Err(Failure::Schema(format!("{}: no header line", path.display())))
}

pub fn check_family(cfg: &RunConfig, found: Family) -> CliResult<()> {
    match cfg.family {
        Some(expected) if expected != found => Err(drivelife::Error::Family { expected, found }.into()),
        _ => Ok(()),
    }
}

pub fn parse_file(path: &Path, family: Family) -> CliResult<FleetDataset> {
    let f = File::open(path).map_err(|e| Failure::io(path.display(), e))?;
    Ok(drivelife::ingest::parse_canonical(family, BufReader::new(f), &path.display().to_string())?)
}

/// Apply the model whitelist and date window.
pub fn apply_filters(ds: FleetDataset, cfg: &RunConfig) -> CliResult<FleetDataset> {
    if cfg.models.is_empty() && cfg.from.is_none() && cfg.to.is_none() {
        return Ok(ds);
    }
    match ds.family() {
        Family::Hdd => {
            let models: BTreeSet<String> = if cfg.models.is_empty() {
                ds.drive_models().into_values().collect()
            } else {
                cfg.models.iter().cloned().collect()
            };
            let dates = ds.hdd_drives()?.values().flatten().map(|r| r.date);
            let (lo, hi) = dates.fold((NaiveDate::MAX, NaiveDate::MIN), |(lo, hi), d| (lo.min(d), hi.max(d)));
            Ok(filter_hdd(&ds, &models, cfg.from.unwrap_or(lo), cfg.to.unwrap_or(hi.max(lo)))?)
        }
        Family::Ssd => {
            if cfg.from.is_some() || cfg.to.is_some() {
                return Err(Failure::Usage(
                    "--from/--to apply to HDD snapshots; SSD logs have no calendar dates".into(),
                ));
            }
            let FleetRecords::Ssd(drives) = ds.records else { unreachable!() };
            let kept: SsdDrives = drives
                .into_iter()
                .filter(|(_, recs)| recs.first().is_some_and(|r| cfg.models.iter().any(|m| m == r.model.as_str())))
                .collect();
            let mut prov = ds.provenance;
            prov.filters.push(format!("models={}", cfg.models.join("|")));
            Ok(FleetDataset::ssd(kept, prov))
        }
    }
}

/// `--input` if given, else the dataset written by `ingest` or `synth`.
pub fn dataset_path(cfg: &RunConfig) -> CliResult<PathBuf> {
    match cfg.input.as_slice() {
        [] => {
            let p = cfg.out.join(DATASET);
            if !p.exists() {
                return Err(Failure::Io(format!(
                    "no dataset at {}; run `drivelife ingest` or `drivelife synth` first, or pass --input",
                    p.display()
                )));
            }
            Ok(p)
        }
        [p] if p.is_file() => Ok(p.clone()),
        _ => Err(Failure::Usage(format!(
            "`{}` reads one canonical dataset file; ingest raw inputs first",
            cfg.command
        ))),
    }
}

pub fn load(cfg: &RunConfig) -> CliResult<FleetDataset> {
    let path = dataset_path(cfg)?;
    let family = sniff_family(&path)?;
    check_family(cfg, family)?;
    let ds = parse_file(&path, family)?;
    if ds.drive_count() == 0 {
        return Err(Failure::Schema(format!("{}: no valid records", path.display())));
    }
    apply_filters(ds, cfg)
}

/// Dataset, its failures and unlabeled feature rows.
pub struct Prepared {
    pub dataset: FleetDataset,
    pub failures: Vec<FailureEvent>,
    pub rows: FeatureRows,
}

impl Prepared {
    pub fn load(cfg: &RunConfig) -> CliResult<Self> {
        let dataset = load(cfg)?;
        let failures = reconstruct(&dataset)?.failures;
        let rows = make_features(&dataset)?;
        Ok(Prepared { dataset, failures, rows })
    }

    pub fn examples(&self, lookahead: u32) -> ExampleSet {
        label_lookahead(&self.rows, &self.failures, lookahead)
    }
}
