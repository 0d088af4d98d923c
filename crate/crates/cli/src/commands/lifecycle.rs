use std::collections::BTreeSet;

use drivelife::lifecycle::{
    censored_cdf, failure_count_distribution, preswap_gap_sample, reconstruct, repair_stats, time_to_failure_sample,
    time_to_repair_sample, CensoredSample, Terminal,
};
use drivelife::Family;
use serde::Serialize;

use crate::artifacts::{cell, Out};
use crate::config::RunConfig;
use crate::data;
use crate::failure::CliResult;

const REPAIR_HORIZONS: [i64; 7] = [1, 7, 30, 90, 180, 365, 730];

#[derive(Serialize)]
struct CdfSummary {
    file: String,
    observed: usize,
    censored: usize,
    censored_mass: f64,
}

/// Step CDF evaluated at 0 and every distinct observed value. `None` when
/// there is nothing to plot.
fn write_cdf(out: &mut Out, name: &str, sample: &CensoredSample) -> CliResult<Option<CdfSummary>> {
    if sample.total() == 0 {
        return Ok(None);
    }
    let mut grid: Vec<f64> = sample.values.iter().copied().chain([0.0]).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let cdf = censored_cdf(sample, &grid)?;
    out.csv(name, &["days", "cdf"], cdf.points.iter().map(|(t, f)| vec![t.to_string(), f.to_string()]))?;
    Ok(Some(CdfSummary {
        file: name.to_string(),
        observed: sample.values.len(),
        censored: sample.censored_count,
        censored_mass: cdf.censored_mass,
    }))
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let ds = data::load(cfg)?;
    let lc = reconstruct(&ds)?;
    let population = ds.drive_count();
    let mut out = Out::create(cfg)?;

    out.csv(
        "failures.csv",
        &["drive", "day", "age_days", "ordinal", "swap_day", "degenerate"],
        lc.failures.iter().map(|f| {
            vec![
                f.drive.to_string(),
                f.day.to_string(),
                f.age_days.to_string(),
                f.ordinal.to_string(),
                cell(f.swap_day),
                (f.degenerate as u8).to_string(),
            ]
        }),
    )?;
    out.csv(
        "periods.csv",
        &["drive", "start_day", "end_day", "length_days", "terminal"],
        lc.periods.iter().map(|p| {
            vec![
                p.drive.to_string(),
                p.start_day.to_string(),
                p.end_day.to_string(),
                p.length_days().to_string(),
                match p.terminal {
                    Terminal::Failure => "failure".into(),
                    Terminal::Censored => "censored".into(),
                },
            ]
        }),
    )?;
    out.csv(
        "repairs.csv",
        &["drive", "fail_day", "swap_day", "reentry_day", "repair_days", "preswap_gap_days", "limbo"],
        lc.repairs.iter().map(|r| {
            vec![
                r.drive.to_string(),
                r.fail_day.to_string(),
                cell(r.swap_day),
                cell(r.reentry_day),
                cell(r.repair_days()),
                cell(r.preswap_gap_days),
                (r.in_limbo() as u8).to_string(),
            ]
        }),
    )?;
    let counts = failure_count_distribution(&lc.failures, population)?;
    out.csv(
        "failure_counts.csv",
        &["failures", "drives", "share_of_all", "share_of_failed"],
        counts.iter().map(|c| {
            vec![
                c.failures.to_string(),
                c.drives.to_string(),
                c.share_of_all.to_string(),
                cell(c.share_of_failed),
            ]
        }),
    )?;
    let repaired = repair_stats(&lc.repairs, &REPAIR_HORIZONS, population)?;
    out.csv(
        "repair_fractions.csv",
        &["horizon_days", "of_failed", "of_all"],
        repaired
            .iter()
            .map(|r| vec![r.horizon_days.to_string(), r.of_failed.to_string(), r.of_all.to_string()]),
    )?;

    let mut cdfs = Vec::new();
    cdfs.extend(write_cdf(&mut out, "ttf_cdf.csv", &time_to_failure_sample(&lc.periods))?);
    cdfs.extend(write_cdf(&mut out, "repair_cdf.csv", &time_to_repair_sample(&lc.repairs))?);
    if ds.family() == Family::Ssd {
        cdfs.extend(write_cdf(&mut out, "preswap_gap_cdf.csv", &preswap_gap_sample(&lc.repairs))?);
    }

    #[derive(Serialize)]
    struct LifecycleSummary {
        family: Family,
        drives: usize,
        failures: usize,
        failed_drives: usize,
        failed_share: f64,
        degenerate_failures: usize,
        periods: usize,
        censored_periods: usize,
        repair_spells: usize,
        censored_repairs: usize,
        limbo_spells: usize,
        failure_counts: Vec<drivelife::lifecycle::FailureCountShare>,
        repair_fractions: Vec<drivelife::lifecycle::RepairFraction>,
        cdfs: Vec<CdfSummary>,
    }
    let failed_drives = lc.failures.iter().map(|f| &f.drive).collect::<BTreeSet<_>>().len();
    let summary = LifecycleSummary {
        family: ds.family(),
        drives: population,
        failures: lc.failures.len(),
        failed_drives,
        failed_share: failed_drives as f64 / population as f64,
        degenerate_failures: lc.failures.iter().filter(|f| f.degenerate).count(),
        periods: lc.periods.len(),
        censored_periods: lc.periods.iter().filter(|p| p.terminal == Terminal::Censored).count(),
        repair_spells: lc.repairs.len(),
        censored_repairs: lc.repairs.iter().filter(|r| r.reentry_day.is_none()).count(),
        limbo_spells: lc.repairs.iter().filter(|r| r.in_limbo()).count(),
        failure_counts: counts,
        repair_fractions: repaired,
        cdfs,
    };
    out.json("lifecycle.json", "lifecycle", &summary)
}
