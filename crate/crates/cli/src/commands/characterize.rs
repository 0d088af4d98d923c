use drivelife::charstats::{
    hfh_threshold_sweep, monthly_failure_rate, pe_binned_failure_rate, prefailure_error_percentiles,
    prefailure_error_probability, spearman_matrix, write_intensity_quartiles, RateCurve,
};
use drivelife::featurize::make_features;
use drivelife::ingest::ErrorKind;
use drivelife::lifecycle::reconstruct;
use drivelife::seed;
use serde::Serialize;
use serde_json::{json, Value};

use crate::artifacts::{cell, Out};
use crate::cli::Analysis;
use crate::config::RunConfig;
use crate::data;
use crate::failure::CliResult;

pub const HFH_THRESHOLDS: [f64; 6] = [10_000.0, 20_000.0, 30_000.0, 40_000.0, 50_000.0, 60_000.0];
const PE_BIN: u64 = 250;
const PREFAILURE_WINDOWS: [u32; 5] = [1, 2, 7, 14, 30];
const PERCENTILES: [f64; 3] = [50.0, 90.0, 99.0];
const PERCENTILE_MAX_OFFSET: u32 = 30;

#[derive(Serialize)]
struct Produced {
    analysis: Analysis,
    files: Vec<String>,
    summary: Value,
}

fn rate_rows(curve: &RateCurve) -> impl Iterator<Item = Vec<String>> + '_ {
    curve.bins.iter().map(|b| {
        vec![
            b.lo.to_string(),
            b.hi.to_string(),
            b.failures.to_string(),
            b.exposure.to_string(),
            cell(b.rate),
        ]
    })
}

const RATE_HEADER: [&str; 5] = ["lo", "hi", "failures", "exposure", "rate"];

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let ds = data::load(cfg)?;
    let family = ds.family();
    let mut analyses: Vec<Analysis> = if cfg.analysis.is_empty() || cfg.analysis.contains(&Analysis::All) {
        Analysis::for_family(family)
    } else {
        cfg.analysis.clone()
    };
    analyses.sort();
    analyses.dedup();
    let seed = if analyses.contains(&Analysis::Prefailure) {
        Some(cfg.require_seed()?)
    } else {
        None
    };
    let failures = reconstruct(&ds)?.failures;
    let mut out = Out::create(cfg)?;
    let mut produced = Vec::new();

    for analysis in analyses {
        let (files, summary) = match analysis {
            Analysis::All => unreachable!("expanded above"),
            Analysis::Correlations => {
                let names = make_features(&ds)?.spec.names;
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                let m = spearman_matrix(&ds, &refs)?;
                let mut header = vec!["feature"];
                header.extend(refs.iter().copied());
                out.csv(
                    "correlations.csv",
                    &header,
                    m.labels.iter().zip(&m.rho).map(|(l, row)| {
                        std::iter::once(l.clone()).chain(row.iter().map(|v| cell(*v))).collect()
                    }),
                )?;
                (vec!["correlations.csv"], json!({"features": m.labels.len()}))
            }
            Analysis::MonthlyRate => {
                let curve = monthly_failure_rate(&failures, &ds);
                out.csv("monthly_failure_rate.csv", &RATE_HEADER, rate_rows(&curve))?;
                (vec!["monthly_failure_rate.csv"], json!({"months": curve.bins.len()}))
            }
            Analysis::PeRate => {
                let pe = pe_binned_failure_rate(&failures, &ds, PE_BIN)?;
                out.csv("pe_failure_rate.csv", &RATE_HEADER, rate_rows(&pe.curve))?;
                out.csv(
                    "pe_failure_cdf.csv",
                    &["pe_cycles", "share_of_failures"],
                    pe.cdf.iter().map(|(x, f)| vec![x.to_string(), f.to_string()]),
                )?;
                (
                    vec!["pe_failure_rate.csv", "pe_failure_cdf.csv"],
                    json!({"bin_width": PE_BIN, "bins": pe.curve.bins.len(), "unplaced": pe.unplaced}),
                )
            }
            Analysis::HfhSweep => {
                let rows = hfh_threshold_sweep(&failures, &ds, &HFH_THRESHOLDS)?;
                out.csv(
                    "hfh_sweep.csv",
                    &[
                        "threshold",
                        "small_drives",
                        "small_failed",
                        "large_drives",
                        "large_failed",
                        "excluded",
                        "small_rate",
                        "large_rate",
                        "large_share",
                    ],
                    rows.iter().map(|r| {
                        vec![
                            r.threshold.to_string(),
                            r.small_drives.to_string(),
                            r.small_failed.to_string(),
                            r.large_drives.to_string(),
                            r.large_failed.to_string(),
                            r.excluded.to_string(),
                            cell(r.small_rate),
                            cell(r.large_rate),
                            cell(r.large_share),
                        ]
                    }),
                )?;
                (vec!["hfh_sweep.csv"], serde_json::to_value(&rows)?)
            }
            Analysis::Prefailure => {
                let seed = seed.expect("required above");
                let mut rows = Vec::new();
                for (i, kind) in ErrorKind::ALL.iter().enumerate() {
                    let probs =
                        prefailure_error_probability(&failures, &ds, *kind, &PREFAILURE_WINDOWS, seed::derive(seed, i as u64))?;
                    rows.extend(probs.into_iter().map(|p| {
                        vec![kind.to_string(), p.window_days.to_string(), cell(p.probability), cell(p.baseline)]
                    }));
                }
                out.csv("prefailure_probability.csv", &["kind", "window_days", "probability", "baseline"], rows)?;
                (vec!["prefailure_probability.csv"], json!({"windows": PREFAILURE_WINDOWS}))
            }
            Analysis::Percentiles => {
                let mut rows = Vec::new();
                for kind in ErrorKind::ALL {
                    for o in prefailure_error_percentiles(&failures, &ds, kind, &PERCENTILES, PERCENTILE_MAX_OFFSET)? {
                        let mut r = vec![kind.to_string(), o.offset.to_string(), o.nonzero.to_string()];
                        r.extend(o.values.iter().map(|v| cell(*v)));
                        rows.push(r);
                    }
                }
                out.csv("prefailure_percentiles.csv", &["kind", "offset", "nonzero", "p50", "p90", "p99"], rows)?;
                (vec!["prefailure_percentiles.csv"], json!({"percentiles": PERCENTILES, "max_offset": PERCENTILE_MAX_OFFSET}))
            }
            Analysis::WriteQuartiles => {
                let q = write_intensity_quartiles(&ds)?;
                out.csv(
                    "write_quartiles.csv",
                    &["month", "days", "q1", "median", "q3"],
                    q.iter().map(|m| vec![m.month.to_string(), m.days.to_string(), cell(m.q1), cell(m.median), cell(m.q3)]),
                )?;
                (vec!["write_quartiles.csv"], json!({"months": q.len()}))
            }
        };
        produced.push(Produced {
            analysis,
            files: files.into_iter().map(String::from).collect(),
            summary,
        });
    }
    out.json("characterize.json", "analyses", &produced)
}
