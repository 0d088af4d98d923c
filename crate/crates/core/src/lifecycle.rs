//! Failure, swap and repair timelines with explicit right-censoring.
//!
//! Day coordinates are per drive: SSD days are drive-age days derived from
//! `timestamp_us`; HDD days count from the drive's first snapshot. HDD ages
//! come from SMART 9 (power-on hours / 24) when reported.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{DriveId, Family, FleetDataset, HddDailyRecord, SsdDailyRecord};

/// Bound on how far back a trailing run of zero-activity SSD days is trimmed.
pub const MAX_INACTIVITY_TRIM_DAYS: i64 = 30;

/// Pre-swap gaps longer than this mark a spell as "in limbo".
pub const LIMBO_GAP_DAYS: i64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    Failure,
    Censored,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationalPeriod {
    pub drive: DriveId,
    pub start_day: i64,
    pub end_day: i64,
    pub terminal: Terminal,
}

impl OperationalPeriod {
    /// Number of observed days, both endpoints included.
    pub fn length_days(&self) -> i64 {
        self.end_day - self.start_day + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureEvent {
    pub drive: DriveId,
    pub family: Family,
    /// Timeline day of the last operational day.
    pub day: i64,
    pub age_days: i64,
    /// 1-based failure index within the drive.
    pub ordinal: u32,
    /// SSD only: day the swap was logged.
    pub swap_day: Option<i64>,
    /// SSD only: the swap had no telemetry to anchor the failure on.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairSpell {
    pub drive: DriveId,
    pub fail_day: i64,
    pub swap_day: Option<i64>,
    /// First operational record after the failure; `None` when censored.
    pub reentry_day: Option<i64>,
    /// SSD only: days from the failure to the swap.
    pub preswap_gap_days: Option<i64>,
}

impl RepairSpell {
    pub fn repair_days(&self) -> Option<i64> {
        self.reentry_day.map(|r| r - self.fail_day)
    }

    pub fn in_limbo(&self) -> bool {
        self.preswap_gap_days.is_some_and(|g| g > LIMBO_GAP_DAYS)
    }
}

/// Finite durations plus a count of observations that never ended.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CensoredSample {
    pub values: Vec<f64>,
    pub censored_count: usize,
}

impl CensoredSample {
    pub fn total(&self) -> usize {
        self.values.len() + self.censored_count
    }
}

/// Reconstructed lifecycle of a whole fleet.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Lifecycle {
    pub failures: Vec<FailureEvent>,
    pub periods: Vec<OperationalPeriod>,
    pub repairs: Vec<RepairSpell>,
}

/// Days on which a drive has operational telemetry, ordered.
fn telemetry_days(ds: &FleetDataset) -> BTreeMap<DriveId, Vec<i64>> {
    match &ds.records {
        crate::ingest::FleetRecords::Hdd(drives) => drives
            .iter()
            .map(|(id, recs)| {
                let first = recs[0].date;
                (id.clone(), recs.iter().map(|r| (r.date - first).num_days()).collect())
            })
            .collect(),
        crate::ingest::FleetRecords::Ssd(drives) => drives
            .iter()
            .map(|(id, recs)| {
                (
                    id.clone(),
                    recs.iter().filter(|r| r.summary.is_some()).map(SsdDailyRecord::day).collect(),
                )
            })
            .collect(),
    }
}

pub fn reconstruct(ds: &FleetDataset) -> Result<Lifecycle> {
    let failures = detect_failures(ds)?;
    let periods = extract_operational_periods(ds, &failures);
    let repairs = repair_spells(ds, &failures);
    Ok(Lifecycle {
        failures,
        periods,
        repairs,
    })
}

pub fn detect_failures(ds: &FleetDataset) -> Result<Vec<FailureEvent>> {
    match ds.family() {
        Family::Hdd => detect_hdd_failures(ds),
        Family::Ssd => detect_ssd_failures(ds),
    }
}

/// HDD age in days: SMART 9 / 24 when present, else days since first snapshot.
pub fn hdd_age_days(rec: &HddDailyRecord, first: &HddDailyRecord) -> i64 {
    match rec.smart_raw.get(9) {
        Some(hours) => (hours / 24) as i64,
        None => (rec.date - first.date).num_days(),
    }
}

/// One event per snapshot flagged as failed. The flagged day is the failure day.
pub fn detect_hdd_failures(ds: &FleetDataset) -> Result<Vec<FailureEvent>> {
    let drives = ds.hdd_drives()?;
    let mut out = Vec::new();
    for (id, recs) in drives {
        let first = &recs[0];
        let mut ordinal = 0;
        for r in recs.iter().filter(|r| r.failed_today) {
            ordinal += 1;
            out.push(FailureEvent {
                drive: id.clone(),
                family: Family::Hdd,
                day: (r.date - first.date).num_days(),
                age_days: hdd_age_days(r, first),
                ordinal,
                swap_day: None,
                degenerate: false,
            });
        }
    }
    Ok(out)
}

/// One event per swap. Walking back from the swap, days without a record are
/// skipped, then a trailing run of recorded zero-activity days (bounded to
/// [`MAX_INACTIVITY_TRIM_DAYS`] before the last record). The failure lands on
/// the last day with read or write activity.
pub fn detect_ssd_failures(ds: &FleetDataset) -> Result<Vec<FailureEvent>> {
    let drives = ds.ssd_drives()?;
    let mut out = Vec::new();
    for (id, recs) in drives {
        out.extend(ssd_drive_failures(id, recs));
    }
    Ok(out)
}

fn ssd_drive_failures(id: &DriveId, recs: &[SsdDailyRecord]) -> Vec<FailureEvent> {
    let mut out = Vec::new();
    let mut segment_start = 0usize;
    let mut prev_swap_day: Option<i64> = None;
    for (i, rec) in recs.iter().enumerate() {
        if !rec.swap_event {
            continue;
        }
        let swap_day = rec.day();
        let segment: Vec<&SsdDailyRecord> = recs[segment_start..i]
            .iter()
            .filter(|r| r.summary.is_some())
            .collect();
        let (day, degenerate) = match segment.last() {
            None => (prev_swap_day.unwrap_or(0), true),
            Some(last) => (failure_day_in_segment(&segment, last.day()), false),
        };
        out.push(FailureEvent {
            drive: id.clone(),
            family: Family::Ssd,
            day,
            age_days: day,
            ordinal: out.len() as u32 + 1,
            swap_day: Some(swap_day),
            degenerate,
        });
        segment_start = i + 1;
        prev_swap_day = Some(swap_day);
    }
    out
}

/// `segment` holds the records with telemetry preceding one swap.
fn failure_day_in_segment(segment: &[&SsdDailyRecord], last_day: i64) -> i64 {
    let mut earliest_trimmed = last_day;
    for r in segment.iter().rev() {
        let s = r.summary.as_ref().expect("segment records carry telemetry");
        if s.is_active() {
            return r.day();
        }
        if last_day - r.day() >= MAX_INACTIVITY_TRIM_DAYS {
            return earliest_trimmed;
        }
        earliest_trimmed = r.day();
    }
    // No activity anywhere in the segment: anchor on its first record.
    segment[0].day()
}

/// Split each drive's observed telemetry into operational periods.
///
/// A period starts at the drive's first telemetry day or at a post-failure
/// re-entry and ends at the next failure (`Failure`) or the last telemetry
/// day (`Censored`).
pub fn extract_operational_periods(
    ds: &FleetDataset,
    failures: &[FailureEvent],
) -> Vec<OperationalPeriod> {
    let days = telemetry_days(ds);
    let by_drive = group_failures(failures);
    let mut out = Vec::new();
    for (id, days) in &days {
        let fails = by_drive.get(id).map(Vec::as_slice).unwrap_or(&[]);
        let mut start = days.first().copied();
        for f in fails {
            match start {
                Some(s) if s <= f.day => out.push(period(id, s, f.day, Terminal::Failure)),
                _ => out.push(period(id, f.day, f.day, Terminal::Failure)),
            }
            let resume_after = f.swap_day.unwrap_or(f.day).max(f.day);
            start = first_after(days, resume_after);
        }
        if let (Some(s), Some(&last)) = (start, days.last()) {
            out.push(period(id, s, last, Terminal::Censored));
        }
    }
    out
}

fn period(id: &DriveId, start_day: i64, end_day: i64, terminal: Terminal) -> OperationalPeriod {
    OperationalPeriod {
        drive: id.clone(),
        start_day,
        end_day,
        terminal,
    }
}

fn first_after(days: &[i64], day: i64) -> Option<i64> {
    let idx = days.partition_point(|&d| d <= day);
    days.get(idx).copied()
}

fn group_failures(failures: &[FailureEvent]) -> BTreeMap<DriveId, Vec<&FailureEvent>> {
    let mut by_drive: BTreeMap<DriveId, Vec<&FailureEvent>> = BTreeMap::new();
    for f in failures {
        by_drive.entry(f.drive.clone()).or_default().push(f);
    }
    for v in by_drive.values_mut() {
        v.sort_by_key(|f| (f.day, f.ordinal));
    }
    by_drive
}

/// One repair spell per failure. Re-entry is the first telemetry day after
/// the failure (after the swap for SSDs), regardless of the gap length.
pub fn repair_spells(ds: &FleetDataset, failures: &[FailureEvent]) -> Vec<RepairSpell> {
    let days = telemetry_days(ds);
    let mut out = Vec::with_capacity(failures.len());
    for f in failures {
        let resume_after = f.swap_day.unwrap_or(f.day).max(f.day);
        let reentry_day = days.get(&f.drive).and_then(|d| first_after(d, resume_after));
        out.push(RepairSpell {
            drive: f.drive.clone(),
            fail_day: f.day,
            swap_day: f.swap_day,
            reentry_day,
            preswap_gap_days: f.swap_day.map(|s| s - f.day),
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairFraction {
    pub horizon_days: i64,
    /// Share of spells repaired within the horizon.
    pub of_failed: f64,
    /// The same count over the whole drive population.
    pub of_all: f64,
}

/// Fraction of failures that re-enter within each horizon.
pub fn repair_stats(
    spells: &[RepairSpell],
    horizons: &[i64],
    population: usize,
) -> Result<Vec<RepairFraction>> {
    if horizons.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Argument("horizons must be sorted ascending".into()));
    }
    let mut gaps: Vec<i64> = spells.iter().filter_map(RepairSpell::repair_days).collect();
    gaps.sort_unstable();
    Ok(horizons
        .iter()
        .map(|&h| {
            let repaired = gaps.partition_point(|&g| g <= h);
            let frac = |den: usize| if den == 0 { 0.0 } else { repaired as f64 / den as f64 };
            RepairFraction {
                horizon_days: h,
                of_failed: frac(spells.len()),
                of_all: frac(population),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureCountShare {
    pub failures: u32,
    pub drives: usize,
    pub share_of_all: f64,
    /// `None` for k = 0.
    pub share_of_failed: Option<f64>,
}

/// Distribution of lifetime failure counts over a population of drives.
pub fn failure_count_distribution(
    failures: &[FailureEvent],
    population: usize,
) -> Result<Vec<FailureCountShare>> {
    let mut per_drive: BTreeMap<&DriveId, u32> = BTreeMap::new();
    for f in failures {
        *per_drive.entry(&f.drive).or_default() += 1;
    }
    if population < per_drive.len() {
        return Err(Error::Argument(format!(
            "population {population} is smaller than the {} failed drives",
            per_drive.len()
        )));
    }
    if population == 0 {
        return Err(Error::Empty("drive population".into()));
    }
    let mut hist: BTreeMap<u32, usize> = BTreeMap::new();
    hist.insert(0, population - per_drive.len());
    for &k in per_drive.values() {
        *hist.entry(k).or_default() += 1;
    }
    let failed = per_drive.len();
    Ok(hist
        .into_iter()
        .filter(|&(k, n)| k == 0 || n > 0)
        .map(|(k, n)| FailureCountShare {
            failures: k,
            drives: n,
            share_of_all: n as f64 / population as f64,
            share_of_failed: (k > 0).then(|| n as f64 / failed as f64),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensoredCdf {
    /// `(t, F(t))` pairs on the requested grid.
    pub points: Vec<(f64, f64)>,
    pub censored_mass: f64,
}

/// Empirical CDF where unterminated observations keep their mass off the curve:
/// `F(t) = #{v <= t} / (n + censored)`.
pub fn censored_cdf(sample: &CensoredSample, grid: &[f64]) -> Result<CensoredCdf> {
    let total = sample.total();
    if total == 0 {
        return Err(Error::Empty("censored sample".into()));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Argument("grid must be sorted ascending".into()));
    }
    let mut values = sample.values.clone();
    values.sort_by(f64::total_cmp);
    let points = grid
        .iter()
        .map(|&t| {
            let below = values.partition_point(|&v| v <= t);
            (t, below as f64 / total as f64)
        })
        .collect();
    Ok(CensoredCdf {
        points,
        censored_mass: sample.censored_count as f64 / total as f64,
    })
}

/// Lengths of failure-terminated periods; censored periods count as censored.
pub fn time_to_failure_sample(periods: &[OperationalPeriod]) -> CensoredSample {
    let mut s = CensoredSample::default();
    for p in periods {
        match p.terminal {
            Terminal::Failure => s.values.push(p.length_days() as f64),
            Terminal::Censored => s.censored_count += 1,
        }
    }
    s
}

pub fn time_to_repair_sample(spells: &[RepairSpell]) -> CensoredSample {
    let mut s = CensoredSample::default();
    for r in spells {
        match r.repair_days() {
            Some(d) => s.values.push(d as f64),
            None => s.censored_count += 1,
        }
    }
    s
}

pub fn preswap_gap_sample(spells: &[RepairSpell]) -> CensoredSample {
    CensoredSample {
        values: spells
            .iter()
            .filter_map(|r| r.preswap_gap_days.map(|g| g as f64))
            .collect(),
        censored_count: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{DailySummary, Provenance, SmartValues, SsdDrives, SsdModel, US_PER_DAY};
    use chrono::NaiveDate;
    use std::sync::Arc;

    fn ssd_rec(id: &str, day: u64, active: bool, swap: bool) -> SsdDailyRecord {
        SsdDailyRecord {
            drive_id: Arc::from(id),
            model: SsdModel::MlcA,
            timestamp_us: day * US_PER_DAY,
            summary: Some(DailySummary {
                read_ops: active as u64 * 10,
                write_ops: active as u64 * 5,
                ..Default::default()
            }),
            swap_event: swap,
        }
    }

    fn swap_only(id: &str, day: u64) -> SsdDailyRecord {
        SsdDailyRecord {
            drive_id: Arc::from(id),
            model: SsdModel::MlcA,
            timestamp_us: day * US_PER_DAY,
            summary: None,
            swap_event: true,
        }
    }

    fn ssd_ds(recs: Vec<SsdDailyRecord>) -> FleetDataset {
        let mut drives = SsdDrives::new();
        for r in recs {
            drives.entry(r.drive_id.clone()).or_insert_with(Vec::new).push(r);
        }
        FleetDataset::ssd(drives, Provenance::default())
    }

    #[test]
    fn trims_inactivity_and_missing_days() {
        let mut recs: Vec<_> = (1..=7).map(|d| ssd_rec("a", d, true, false)).collect();
        recs.extend((8..=10).map(|d| ssd_rec("a", d, false, false)));
        recs.push(swap_only("a", 13));
        let f = detect_ssd_failures(&ssd_ds(recs)).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].day, 7);
        assert_eq!(f[0].swap_day, Some(13));
        assert!(!f[0].degenerate);
    }

    #[test]
    fn active_day_before_swap() {
        let recs = vec![ssd_rec("a", 0, true, false), ssd_rec("a", 1, true, false), swap_only("a", 2)];
        let f = detect_ssd_failures(&ssd_ds(recs)).unwrap();
        assert_eq!(f[0].day, 1);
    }

    #[test]
    fn two_swaps_two_events() {
        let recs = vec![
            ssd_rec("a", 0, true, false),
            ssd_rec("a", 1, true, false),
            swap_only("a", 3),
            ssd_rec("a", 10, true, false),
            ssd_rec("a", 11, false, false),
            swap_only("a", 12),
        ];
        let f = detect_ssd_failures(&ssd_ds(recs)).unwrap();
        let days: Vec<(i64, u32)> = f.iter().map(|e| (e.day, e.ordinal)).collect();
        assert_eq!(days, vec![(1, 1), (10, 2)]);
    }

    #[test]
    fn swap_without_records_is_degenerate() {
        let f = detect_ssd_failures(&ssd_ds(vec![swap_only("a", 4)])).unwrap();
        assert_eq!(f[0].day, 0);
        assert!(f[0].degenerate);
    }

    #[test]
    fn all_inactive_anchors_on_first_record() {
        let recs = vec![ssd_rec("a", 2, false, false), ssd_rec("a", 3, false, false), swap_only("a", 5)];
        let f = detect_ssd_failures(&ssd_ds(recs)).unwrap();
        assert_eq!(f[0].day, 2);
    }

    #[test]
    fn inactivity_trim_is_bounded() {
        let mut recs = vec![ssd_rec("a", 0, true, false)];
        recs.extend((1..=60).map(|d| ssd_rec("a", d, false, false)));
        recs.push(swap_only("a", 61));
        let f = detect_ssd_failures(&ssd_ds(recs)).unwrap();
        // trimming stops 30 days before the last record (day 60)
        assert_eq!(f[0].day, 31);
    }

    #[test]
    fn periods_and_reentry() {
        let mut recs: Vec<_> = (0..=7).map(|d| ssd_rec("a", d, true, false)).collect();
        recs.push(swap_only("a", 9));
        recs.extend((30..=60).map(|d| ssd_rec("a", d, true, false)));
        let ds = ssd_ds(recs);
        let lc = reconstruct(&ds).unwrap();
        assert_eq!(
            lc.periods,
            vec![period(&Arc::from("a"), 0, 7, Terminal::Failure), period(&Arc::from("a"), 30, 60, Terminal::Censored)]
        );
        assert_eq!(lc.repairs[0].reentry_day, Some(30));
        assert_eq!(lc.repairs[0].preswap_gap_days, Some(2));
    }

    #[test]
    fn never_failing_drive_single_censored_period() {
        let ds = ssd_ds((0..100).map(|d| ssd_rec("a", d, true, false)).collect());
        let lc = reconstruct(&ds).unwrap();
        assert_eq!(lc.periods.len(), 1);
        assert_eq!(lc.periods[0].terminal, Terminal::Censored);
        assert_eq!(lc.periods[0].length_days(), 100);
    }

    fn hdd_ds(rows: &[(&str, &str, bool, Option<u64>)]) -> FleetDataset {
        let mut drives = crate::ingest::HddDrives::new();
        for &(id, date, failed, poh) in rows {
            let mut smart = SmartValues::default();
            if let Some(h) = poh {
                smart.insert(9, h);
            }
            drives.entry(Arc::from(id)).or_insert_with(Vec::new).push(HddDailyRecord {
                date: NaiveDate::parse_from_str(date, "%Y-%m-%d").unwrap(),
                serial: Arc::from(id),
                model: Arc::from("M"),
                capacity_bytes: None,
                failed_today: failed,
                smart_raw: smart,
            });
        }
        FleetDataset::hdd(drives, Provenance::default())
    }

    #[test]
    fn hdd_failure_rule_and_age_source() {
        let ds = hdd_ds(&[
            ("a", "2015-01-01", false, None),
            ("a", "2015-01-02", false, None),
            ("a", "2015-01-03", true, None),
            ("b", "2015-01-01", false, Some(2400)),
            ("b", "2015-01-02", false, Some(2424)),
            ("b", "2015-01-03", true, Some(2448)),
            ("c", "2015-01-01", false, None),
        ]);
        let f = detect_hdd_failures(&ds).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!((f[0].day, f[0].age_days), (2, 2));
        assert_eq!((f[1].day, f[1].age_days), (2, 102));
    }

    #[test]
    fn hdd_refailure_ordinals() {
        let ds = hdd_ds(&[
            ("a", "2015-01-01", false, None),
            ("a", "2015-01-02", true, None),
            ("a", "2015-03-01", false, None),
            ("a", "2015-03-05", true, None),
        ]);
        let lc = reconstruct(&ds).unwrap();
        let ords: Vec<u32> = lc.failures.iter().map(|f| f.ordinal).collect();
        assert_eq!(ords, vec![1, 2]);
        assert_eq!(lc.repairs[0].reentry_day, Some(59));
        assert_eq!(lc.repairs[1].reentry_day, None);
        // failure on the last observed day leaves no successor period
        assert_eq!(lc.periods.len(), 2);
        assert!(lc.periods.iter().all(|p| p.terminal == Terminal::Failure));
    }

    fn spell(gap: Option<i64>) -> RepairSpell {
        RepairSpell {
            drive: Arc::from("x"),
            fail_day: 10,
            swap_day: None,
            reentry_day: gap.map(|g| 10 + g),
            preswap_gap_days: None,
        }
    }

    #[test]
    fn repair_fractions_hand_count() {
        let spells = vec![spell(Some(1)), spell(Some(10)), spell(Some(400)), spell(None)];
        let r = repair_stats(&spells, &[1, 30, 365], 8).unwrap();
        let of_failed: Vec<f64> = r.iter().map(|x| x.of_failed).collect();
        assert_eq!(of_failed, vec![0.25, 0.5, 0.5]);
        assert_eq!(r[1].of_all, 0.25);

        let censored = vec![spell(None), spell(None)];
        assert!(repair_stats(&censored, &[1, 30], 2).unwrap().iter().all(|x| x.of_failed == 0.0));
        assert!(repair_stats(&[], &[1], 0).unwrap().iter().all(|x| x.of_failed == 0.0 && x.of_all == 0.0));
        assert!(repair_stats(&spells, &[30, 1], 8).is_err());
    }

    fn event(id: &str, ordinal: u32) -> FailureEvent {
        FailureEvent {
            drive: Arc::from(id),
            family: Family::Ssd,
            day: ordinal as i64 * 10,
            age_days: ordinal as i64 * 10,
            ordinal,
            swap_day: None,
            degenerate: false,
        }
    }

    #[test]
    fn failure_count_shares() {
        let f = vec![event("A", 1), event("A", 2), event("B", 1)];
        let dist = failure_count_distribution(&f, 10).unwrap();
        let all: Vec<(u32, f64)> = dist.iter().map(|r| (r.failures, r.share_of_all)).collect();
        assert_eq!(all, vec![(0, 0.8), (1, 0.1), (2, 0.1)]);
        assert_eq!(dist[1].share_of_failed, Some(0.5));
        assert_eq!(dist[2].share_of_failed, Some(0.5));

        let none = failure_count_distribution(&[], 5).unwrap();
        assert_eq!(none.len(), 1);
        assert_eq!(none[0].share_of_all, 1.0);

        assert!(failure_count_distribution(&f, 1).is_err());
    }

    #[test]
    fn cdf_direct_counts() {
        let s = CensoredSample {
            values: vec![2.0, 5.0],
            censored_count: 2,
        };
        let c = censored_cdf(&s, &[5.0]).unwrap();
        assert_eq!(c.points, vec![(5.0, 0.5)]);
        assert_eq!(c.censored_mass, 0.5);

        let s = CensoredSample {
            values: vec![1.0, 2.0, 3.0],
            censored_count: 0,
        };
        assert_eq!(censored_cdf(&s, &[3.0]).unwrap().points[0].1, 1.0);
        assert!(censored_cdf(&CensoredSample::default(), &[1.0]).is_err());
    }
}
