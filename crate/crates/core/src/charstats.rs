//! Fleet characterization: rank correlations, failure-rate curves, wear and
//! pre-failure error statistics.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurize::make_features;
use crate::ingest::{DriveId, ErrorKind, FleetDataset, FleetRecords};
use crate::lifecycle::{hdd_age_days, FailureEvent};
use crate::stats::{average_ranks, nearest_rank_sorted, pearson};

/// Age-days per month bin.
pub const DAYS_PER_MONTH: i64 = 30;

/// Seeded draws used to estimate the arbitrary-window baseline.
pub const BASELINE_DRAWS: usize = 10_000;

/// Spearman rank correlation with average ranks for ties.
///
/// A constant series has no defined correlation and yields
/// [`Error::Undefined`] instead of a fabricated zero.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Argument(format!("series lengths differ: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::Argument("spearman needs at least two observations".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("spearman input".into()));
    }
    pearson(&average_ranks(x), &average_ranks(y))
        .ok_or_else(|| Error::Undefined("spearman of a constant series".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    /// `None` where the coefficient is undefined.
    pub rho: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        self.rho[i][j]
    }
}

/// Pairwise Spearman correlations over drive-day feature rows.
pub fn spearman_matrix(ds: &FleetDataset, features: &[&str]) -> Result<CorrelationMatrix> {
    let rows = make_features(ds)?;
    let mut ranked = Vec::with_capacity(features.len());
    for name in features {
        let j = rows
            .spec
            .index_of(name)
            .ok_or_else(|| Error::Argument(format!("unknown feature {name:?}")))?;
        ranked.push(average_ranks(&rows.column(j)));
    }
    let k = features.len();
    let mut rho = vec![vec![None; k]; k];
    if rows.len() >= 2 {
        for i in 0..k {
            for j in i..k {
                let r = if i == j {
                    pearson(&ranked[i], &ranked[i]).map(|_| 1.0)
                } else {
                    pearson(&ranked[i], &ranked[j])
                };
                rho[i][j] = r;
                rho[j][i] = r;
            }
        }
    }
    Ok(CorrelationMatrix {
        labels: features.iter().map(|s| s.to_string()).collect(),
        rho,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateBin {
    pub lo: f64,
    pub hi: f64,
    pub failures: usize,
    pub exposure: usize,
    /// `None` when no drive is exposed in the bin.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub bins: Vec<RateBin>,
}

impl RateCurve {
    pub fn rates(&self) -> Vec<Option<f64>> {
        self.bins.iter().map(|b| b.rate).collect()
    }

    fn from_counts(width: f64, failing: &BTreeMap<i64, BTreeSet<DriveId>>, exposed: &BTreeMap<i64, BTreeSet<DriveId>>) -> Self {
        let last = exposed
            .keys()
            .chain(failing.keys())
            .copied()
            .max()
            .unwrap_or(-1);
        let bins = (0..=last)
            .map(|b| {
                let exposure = exposed.get(&b).map_or(0, BTreeSet::len);
                let failures = failing.get(&b).map_or(0, BTreeSet::len);
                RateBin {
                    lo: b as f64 * width,
                    hi: (b + 1) as f64 * width,
                    failures,
                    exposure,
                    rate: (exposure > 0).then(|| failures as f64 / exposure as f64),
                }
            })
            .collect();
        RateCurve { bins }
    }
}

/// Drive-age (days) of every telemetry record, per drive.
fn record_ages(ds: &FleetDataset) -> BTreeMap<DriveId, Vec<i64>> {
    match &ds.records {
        FleetRecords::Ssd(drives) => drives
            .iter()
            .map(|(id, recs)| {
                (
                    id.clone(),
                    recs.iter().filter(|r| r.summary.is_some()).map(|r| r.day()).collect(),
                )
            })
            .collect(),
        FleetRecords::Hdd(drives) => drives
            .iter()
            .map(|(id, recs)| (id.clone(), recs.iter().map(|r| hdd_age_days(r, &recs[0])).collect()))
            .collect(),
    }
}

/// Failures per age month normalized by the drives with at least one record
/// in that month.
pub fn monthly_failure_rate(failures: &[FailureEvent], ds: &FleetDataset) -> RateCurve {
    let mut exposed: BTreeMap<i64, BTreeSet<DriveId>> = BTreeMap::new();
    for (id, ages) in record_ages(ds) {
        for a in ages {
            exposed.entry(a.div_euclid(DAYS_PER_MONTH)).or_default().insert(id.clone());
        }
    }
    let mut failing: BTreeMap<i64, BTreeSet<DriveId>> = BTreeMap::new();
    for f in failures {
        failing
            .entry(f.age_days.div_euclid(DAYS_PER_MONTH))
            .or_default()
            .insert(f.drive.clone());
    }
    RateCurve::from_counts(DAYS_PER_MONTH as f64, &failing, &exposed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeFailureCurve {
    pub curve: RateCurve,
    /// `(upper bin edge, share of failures with P/E below it)`.
    pub cdf: Vec<(f64, f64)>,
    /// Failures whose drive had no telemetry on or before the failure day.
    pub unplaced: usize,
}

/// Failure incidence by cumulative P/E cycles, binned by `bin_width` cycles.
pub fn pe_binned_failure_rate(failures: &[FailureEvent], ds: &FleetDataset, bin_width: u64) -> Result<PeFailureCurve> {
    if bin_width == 0 {
        return Err(Error::Argument("bin width must be positive".into()));
    }
    let drives = ds.ssd_drives()?;
    let bin = |pe: u64| (pe / bin_width) as i64;
    let mut exposed: BTreeMap<i64, BTreeSet<DriveId>> = BTreeMap::new();
    for (id, recs) in drives {
        for s in recs.iter().filter_map(|r| r.summary.as_ref()) {
            exposed.entry(bin(s.pe_cycles_cum)).or_default().insert(id.clone());
        }
    }
    let mut failing: BTreeMap<i64, BTreeSet<DriveId>> = BTreeMap::new();
    let mut at_failure: Vec<i64> = Vec::new();
    let mut unplaced = 0;
    for f in failures {
        let pe = drives.get(&f.drive).and_then(|recs| {
            recs.iter()
                .filter(|r| r.day() <= f.day)
                .filter_map(|r| r.summary.as_ref())
                .next_back()
                .map(|s| s.pe_cycles_cum)
        });
        match pe {
            Some(pe) => {
                failing.entry(bin(pe)).or_default().insert(f.drive.clone());
                at_failure.push(bin(pe));
            }
            None => unplaced += 1,
        }
    }
    let curve = RateCurve::from_counts(bin_width as f64, &failing, &exposed);
    at_failure.sort_unstable();
    let total = at_failure.len();
    let cdf = curve
        .bins
        .iter()
        .enumerate()
        .map(|(b, bin)| {
            let below = at_failure.partition_point(|&x| x <= b as i64);
            (bin.hi, if total == 0 { 0.0 } else { below as f64 / total as f64 })
        })
        .collect();
    Ok(PeFailureCurve { curve, cdf, unplaced })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HfhSweepRow {
    pub threshold: f64,
    pub small_drives: usize,
    pub small_failed: usize,
    pub large_drives: usize,
    pub large_failed: usize,
    /// Drives that never report SMART 240.
    pub excluded: usize,
    pub small_rate: Option<f64>,
    pub large_rate: Option<f64>,
    pub large_share: Option<f64>,
}

/// Split drives by whether their maximum observed head flying hours exceed
/// each threshold, and compare failed-drive shares of the two classes.
pub fn hfh_threshold_sweep(failures: &[FailureEvent], ds: &FleetDataset, thresholds: &[f64]) -> Result<Vec<HfhSweepRow>> {
    let drives = ds.hdd_drives()?;
    let failed: BTreeSet<&DriveId> = failures.iter().map(|f| &f.drive).collect();
    let mut max_hfh: Vec<(u64, bool)> = Vec::new();
    let mut excluded = 0;
    for (id, recs) in drives {
        match recs.iter().filter_map(|r| r.smart_raw.get(240)).max() {
            Some(m) => max_hfh.push((m, failed.contains(id))),
            None => excluded += 1,
        }
    }
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    Ok(thresholds
        .iter()
        .map(|&t| {
            let (mut sd, mut sf, mut ld, mut lf) = (0, 0, 0, 0);
            for &(m, f) in &max_hfh {
                if m as f64 > t {
                    ld += 1;
                    lf += f as usize;
                } else {
                    sd += 1;
                    sf += f as usize;
                }
            }
            HfhSweepRow {
                threshold: t,
                small_drives: sd,
                small_failed: sf,
                large_drives: ld,
                large_failed: lf,
                excluded,
                small_rate: ratio(sf, sd),
                large_rate: ratio(lf, ld),
                large_share: ratio(ld, sd + ld),
            }
        })
        .collect())
}

/// Per drive: telemetry days and the count of one error kind on each.
struct ErrorSeries {
    days: Vec<i64>,
    counts: Vec<u32>,
    /// Days with a nonzero count.
    error_days: Vec<i64>,
}

impl ErrorSeries {
    fn any_in(&self, from: i64, to: i64) -> bool {
        let i = self.error_days.partition_point(|&d| d < from);
        self.error_days.get(i).is_some_and(|&d| d <= to)
    }

    fn count_on(&self, day: i64) -> Option<u32> {
        self.days.binary_search(&day).ok().map(|i| self.counts[i])
    }
}

fn error_series(ds: &FleetDataset, kind: ErrorKind) -> Result<BTreeMap<DriveId, ErrorSeries>> {
    Ok(ds
        .ssd_drives()?
        .iter()
        .map(|(id, recs)| {
            let mut s = ErrorSeries {
                days: Vec::new(),
                counts: Vec::new(),
                error_days: Vec::new(),
            };
            for r in recs {
                if let Some(sum) = &r.summary {
                    let c = sum.errors.get(kind);
                    s.days.push(r.day());
                    s.counts.push(c);
                    if c > 0 {
                        s.error_days.push(r.day());
                    }
                }
            }
            (id.clone(), s)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefailureProbability {
    pub window_days: u32,
    /// Share of failures with at least one error in the window ending on the failure day.
    pub probability: Option<f64>,
    /// Same statistic for uniformly drawn drive-days.
    pub baseline: Option<f64>,
}

/// Probability that a failure is preceded by an error of `kind` within the
/// last `n` days (failure day included), against a baseline over
/// [`BASELINE_DRAWS`] seeded arbitrary windows. The same draws serve every
/// `n`, so both columns are non-decreasing in `n`.
pub fn prefailure_error_probability(
    failures: &[FailureEvent],
    ds: &FleetDataset,
    kind: ErrorKind,
    windows: &[u32],
    seed: u64,
) -> Result<Vec<PrefailureProbability>> {
    if windows.contains(&0) {
        return Err(Error::Argument("window lengths must be at least 1 day".into()));
    }
    let series = error_series(ds, kind)?;
    let all: Vec<(&ErrorSeries, i64)> = series
        .values()
        .flat_map(|s| s.days.iter().map(move |&d| (s, d)))
        .collect();
    let mut rng = crate::seed::rng(seed);
    let draws: Vec<usize> = if all.is_empty() {
        Vec::new()
    } else {
        (0..BASELINE_DRAWS).map(|_| rng.random_range(0..all.len())).collect()
    };
    let placed: Vec<(&ErrorSeries, i64)> = failures
        .iter()
        .filter_map(|f| series.get(&f.drive).map(|s| (s, f.day)))
        .collect();
    Ok(windows
        .iter()
        .map(|&n| {
            let n = n as i64;
            let hits = |pairs: &mut dyn Iterator<Item = (&ErrorSeries, i64)>| {
                let (mut hit, mut total) = (0usize, 0usize);
                for (s, end) in pairs {
                    total += 1;
                    hit += s.any_in(end - n + 1, end) as usize;
                }
                (total > 0).then(|| hit as f64 / total as f64)
            };
            PrefailureProbability {
                window_days: n as u32,
                probability: hits(&mut placed.iter().copied()),
                baseline: hits(&mut draws.iter().map(|&i| all[i])),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetPercentiles {
    /// Days before the failure; 0 is the failure day.
    pub offset: u32,
    pub nonzero: usize,
    /// One entry per requested percentile; `None` without nonzero counts.
    pub values: Vec<Option<u32>>,
}

/// Nearest-rank percentiles of the nonzero error counts logged `d` days
/// before each failure, for `d = 0..=max_offset`.
pub fn prefailure_error_percentiles(
    failures: &[FailureEvent],
    ds: &FleetDataset,
    kind: ErrorKind,
    percentiles: &[f64],
    max_offset: u32,
) -> Result<Vec<OffsetPercentiles>> {
    if let Some(p) = percentiles.iter().find(|&&p| !(p > 0.0 && p <= 100.0)) {
        return Err(Error::Argument(format!("percentile {p} outside (0, 100]")));
    }
    let series = error_series(ds, kind)?;
    Ok((0..=max_offset)
        .map(|offset| {
            let mut counts: Vec<u32> = failures
                .iter()
                .filter_map(|f| series.get(&f.drive)?.count_on(f.day - offset as i64))
                .filter(|&c| c > 0)
                .collect();
            counts.sort_unstable();
            OffsetPercentiles {
                offset,
                nonzero: counts.len(),
                values: percentiles.iter().map(|&p| nearest_rank_sorted(&counts, p)).collect(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthQuartiles {
    pub month: i64,
    pub days: usize,
    pub q1: Option<u64>,
    pub median: Option<u64>,
    pub q3: Option<u64>,
}

/// Nearest-rank quartiles of daily write operations per age month.
pub fn write_intensity_quartiles(ds: &FleetDataset) -> Result<Vec<MonthQuartiles>> {
    let mut by_month: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
    for recs in ds.ssd_drives()?.values() {
        for r in recs {
            if let Some(s) = &r.summary {
                by_month.entry(r.day().div_euclid(DAYS_PER_MONTH)).or_default().push(s.write_ops);
            }
        }
    }
    let last = by_month.keys().next_back().copied().unwrap_or(-1);
    Ok((0..=last)
        .map(|month| {
            let mut w = by_month.remove(&month).unwrap_or_default();
            w.sort_unstable();
            MonthQuartiles {
                month,
                days: w.len(),
                q1: nearest_rank_sorted(&w, 25.0),
                median: nearest_rank_sorted(&w, 50.0),
                q3: nearest_rank_sorted(&w, 75.0),
            }
        })
        .collect())
}
