//! `ingest` and `synth`: the two ways to get a canonical dataset.

use std::fs;
use std::path::PathBuf;

use drivelife::ingest::{merge_hdd, write_canonical};
use drivelife::synthgen::{generate_fleet, verify_fleet, write_truth_csv, SynthConfig};
use drivelife::{Family, FleetDataset};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::artifacts::{same_file, Out};
use crate::config::RunConfig;
use crate::data::{apply_filters, check_family, parse_file, sniff_family, DATASET};
use crate::failure::{CliResult, Failure};

/// Files named on the command line, with directories expanded to their
/// `.csv` entries in name order.
fn expand_inputs(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Failure::io(p.display(), e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|e| e.is_file() && e.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
                .collect();
            entries.sort();
            if entries.is_empty() {
                return Err(Failure::Io(format!("{}: no .csv files", p.display())));
            }
            files.extend(entries);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

#[derive(Serialize)]
struct DatasetSummary<'a> {
    family: Family,
    source: &'a str,
    filters: &'a [String],
    drives: usize,
    records: usize,
    data_rows: u64,
    rejected_rows: u64,
    quarantined: &'a [drivelife::ingest::QuarantinedDrive],
}

fn summarize(ds: &FleetDataset) -> DatasetSummary<'_> {
    DatasetSummary {
        family: ds.family(),
        source: &ds.provenance.source,
        filters: &ds.provenance.filters,
        drives: ds.drive_count(),
        records: ds.record_count(),
        data_rows: ds.provenance.data_rows,
        rejected_rows: ds.provenance.rejected_count(),
        quarantined: &ds.provenance.quarantined,
    }
}

fn write_dataset(out: &mut Out, ds: &FleetDataset) -> CliResult<()> {
    out.csv_with(DATASET, |w| Ok(write_canonical(ds, w)?))
}

pub fn ingest(cfg: &RunConfig) -> CliResult<()> {
    if cfg.input.is_empty() {
        return Err(Failure::Usage("ingest needs at least one --input file or directory".into()));
    }
    let files = expand_inputs(&cfg.input)?;
    let target = cfg.out.join(DATASET);
    if let Some(f) = files.iter().find(|f| same_file(f, &target)) {
        return Err(Failure::Usage(format!(
            "input {} would be overwritten by the output; choose another --out",
            f.display()
        )));
    }
    let family = match cfg.family {
        Some(f) => f,
        None => sniff_family(&files[0])?,
    };
    check_family(cfg, family)?;
    let ds = match family {
        Family::Hdd => {
            let parts = files
                .par_iter()
                .map(|f| parse_file(f, Family::Hdd))
                .collect::<CliResult<Vec<_>>>()?;
            let source = cfg.input.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(";");
            merge_hdd(parts, &source)?
        }
        Family::Ssd => match files.as_slice() {
            [f] => parse_file(f, Family::Ssd)?,
            _ => return Err(Failure::Usage("SSD ingest takes exactly one log file".into())),
        },
    };
    let ds = apply_filters(ds, cfg)?;
    if ds.drive_count() == 0 {
        return Err(Failure::Schema("no valid records left after parsing and filtering".into()));
    }

    let mut out = Out::create(cfg)?;
    write_dataset(&mut out, &ds)?;
    out.csv(
        "rejected.csv",
        &["line", "reason"],
        ds.provenance
            .rejected
            .iter()
            .map(|r| vec![r.line.to_string(), r.reason.clone()]),
    )?;
    out.json("ingest.json", "dataset", &summarize(&ds))
}

const PRESETS: [&str; 3] = ["ssd", "hdd", "ssd-infant-planted"];

fn synth_config(cfg: &RunConfig, seed: u64) -> CliResult<SynthConfig> {
    let mut patch = cfg.synth.clone().unwrap_or_else(|| Value::Object(Default::default()));
    let obj = patch
        .as_object_mut()
        .ok_or_else(|| Failure::Usage("config field `synth` must be an object".into()))?;
    let preset = obj.remove("preset");
    let patch_family: Option<Family> = match obj.get("family") {
        Some(v) => Some(serde_json::from_value(v.clone()).map_err(|e| Failure::Usage(format!("synth.family: {e}")))?),
        None => None,
    };
    let base = match preset.as_ref().map(|p| p.as_str()) {
        None => SynthConfig::for_family(cfg.family.or(patch_family).unwrap_or(Family::Ssd)),
        Some(Some("ssd")) => SynthConfig::ssd(),
        Some(Some("hdd")) => SynthConfig::hdd(),
        Some(Some("ssd-infant-planted")) => SynthConfig::ssd_infant_planted(),
        Some(other) => {
            return Err(Failure::Usage(format!(
                "unknown synth preset {other:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    obj.insert("seed".into(), Value::from(seed));
    let synth = SynthConfig::patched(base, patch)?;
    check_family(cfg, synth.family)?;
    Ok(synth)
}

pub fn synth(cfg: &RunConfig) -> CliResult<()> {
    let seed = cfg.require_seed()?;
    let synth = synth_config(cfg, seed)?;
    let fleet = generate_fleet(&synth)?;
    let calibration = verify_fleet(&fleet.dataset, &fleet.truth, &synth);

    #[derive(Serialize)]
    struct SynthArtifact<'a> {
        config: &'a SynthConfig,
        hazards: &'a [f64],
        planted_failures: usize,
        dataset: DatasetSummary<'a>,
        calibration: &'a drivelife::synthgen::CalibrationReport,
    }

    let mut out = Out::create(cfg)?;
    write_dataset(&mut out, &fleet.dataset)?;
    out.csv_with("truth.csv", |w| Ok(write_truth_csv(&fleet.truth, w)?))?;
    out.json(
        "synth.json",
        "synth",
        &SynthArtifact {
            config: &synth,
            hazards: &fleet.hazards,
            planted_failures: fleet.truth.len(),
            dataset: summarize(&fleet.dataset),
            calibration: &calibration,
        },
    )
}
