//! Feature rows, lookahead labels and attribute-based partitioning.
//!
//! Feature values live in one row-major buffer per table; drives are interned
//! into a side table so a multi-million-row table stays compact.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{DriveId, ErrorKind, Family, FleetDataset, SmartValues, SMART_IDS};
use crate::lifecycle::FailureEvent;

/// SMART ids that may receive a `_diff` variant.
pub const DIFF_ELIGIBLE_IDS: [u16; 14] = [4, 5, 7, 9, 10, 12, 192, 193, 197, 198, 199, 240, 241, 242];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub family: Family,
    pub names: Vec<String>,
    pub diff_ids: Vec<u16>,
    pub cumulative_ids: Vec<u16>,
}

const SSD_DAILY: [&str; 3] = ["read_ops", "write_ops", "erase_ops"];

impl FeatureSpec {
    pub fn ssd_default() -> Self {
        let mut names = Vec::new();
        let bases: Vec<String> = SSD_DAILY
            .iter()
            .map(|s| s.to_string())
            .chain(ErrorKind::ALL.iter().map(|k| format!("err_{k}")))
            .collect();
        for b in &bases {
            names.push(b.clone());
            names.push(format!("{b}_cum"));
        }
        names.extend(
            ["pe_cycles_cum", "bad_blocks_factory_cum", "bad_blocks_new_cum", "age_days"]
                .map(String::from),
        );
        FeatureSpec {
            family: Family::Ssd,
            names,
            diff_ids: Vec::new(),
            cumulative_ids: Vec::new(),
        }
    }

    pub fn hdd_default() -> Self {
        Self::hdd(DIFF_ELIGIBLE_IDS.to_vec(), vec![187]).expect("default HDD spec is valid")
    }

    pub fn hdd(diff_ids: Vec<u16>, cumulative_ids: Vec<u16>) -> Result<Self> {
        if let Some(id) = diff_ids.iter().find(|id| !DIFF_ELIGIBLE_IDS.contains(id)) {
            return Err(Error::Argument(format!("SMART {id} cannot receive a diff variant")));
        }
        if !cumulative_ids.contains(&187) {
            return Err(Error::Argument("cumulative ids must include SMART 187".into()));
        }
        if let Some(id) = cumulative_ids.iter().find(|&&id| SmartValues::slot(id).is_none()) {
            return Err(Error::Argument(format!("SMART {id} is not tracked")));
        }
        let mut names: Vec<String> = SMART_IDS.iter().map(|id| format!("smart_{id}_raw")).collect();
        names.extend(diff_ids.iter().map(|id| format!("smart_{id}_diff")));
        names.extend(cumulative_ids.iter().map(|id| format!("smart_{id}_cum")));
        names.push("counter_reset".into());
        Ok(FeatureSpec {
            family: Family::Hdd,
            names,
            diff_ids,
            cumulative_ids,
        })
    }

    pub fn default_for(family: Family) -> Self {
        match family {
            Family::Hdd => Self::hdd_default(),
            Family::Ssd => Self::ssd_default(),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionAttribute {
    DriveAge,
    HeadFlyingHours,
}

impl PartitionAttribute {
    pub fn default_for(family: Family) -> Self {
        match family {
            Family::Ssd => PartitionAttribute::DriveAge,
            Family::Hdd => PartitionAttribute::HeadFlyingHours,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionRule {
    pub attribute: PartitionAttribute,
    pub threshold: f64,
}

impl PartitionRule {
    pub fn new(attribute: PartitionAttribute, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0) || !threshold.is_finite() {
            return Err(Error::Argument(format!("partition threshold must be positive, got {threshold}")));
        }
        Ok(PartitionRule { attribute, threshold })
    }

    pub fn age(days: f64) -> Self {
        Self::new(PartitionAttribute::DriveAge, days).expect("positive threshold")
    }

    pub fn hfh(hours: f64) -> Self {
        Self::new(PartitionAttribute::HeadFlyingHours, hours).expect("positive threshold")
    }
}

impl fmt::Display for PartitionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.attribute {
            PartitionAttribute::DriveAge => write!(f, "age:{}", self.threshold),
            PartitionAttribute::HeadFlyingHours => write!(f, "hfh:{}", self.threshold),
        }
    }
}

impl FromStr for PartitionRule {
    type Err = Error;

    /// `age:90` or `hfh:40000`.
    fn from_str(s: &str) -> Result<Self> {
        let (attr, value) = s
            .split_once(':')
            .ok_or_else(|| Error::Argument(format!("partition rule {s:?} is not attr:threshold")))?;
        let threshold: f64 = value
            .parse()
            .map_err(|_| Error::Argument(format!("bad partition threshold {value:?}")))?;
        let attribute = match attr {
            "age" => PartitionAttribute::DriveAge,
            "hfh" => PartitionAttribute::HeadFlyingHours,
            other => return Err(Error::Argument(format!("unknown partition attribute {other:?}"))),
        };
        Self::new(attribute, threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriveInfo {
    pub id: DriveId,
    pub model: String,
}

/// Unlabeled feature rows aligned to a [`FeatureSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRows {
    pub spec: FeatureSpec,
    pub drives: Vec<DriveInfo>,
    pub values: Vec<f64>,
    pub drive: Vec<u32>,
    pub day: Vec<i64>,
    pub partition_key: Vec<f64>,
    pub key_attribute: PartitionAttribute,
    /// HDD rows where at least one counter went backwards.
    pub resets: usize,
}

impl FeatureRows {
    fn new(spec: FeatureSpec) -> Self {
        let key_attribute = PartitionAttribute::default_for(spec.family);
        FeatureRows {
            spec,
            drives: Vec::new(),
            values: Vec::new(),
            drive: Vec::new(),
            day: Vec::new(),
            partition_key: Vec::new(),
            key_attribute,
            resets: 0,
        }
    }

    pub fn n_features(&self) -> usize {
        self.spec.names.len()
    }

    pub fn len(&self) -> usize {
        self.day.len()
    }

    pub fn is_empty(&self) -> bool {
        self.day.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_features();
        &self.values[i * p..(i + 1) * p]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        let p = self.n_features();
        self.values.iter().skip(j).step_by(p).copied().collect()
    }

    fn push(&mut self, drive: u32, day: i64, key: f64, values: &[f64]) {
        debug_assert_eq!(values.len(), self.n_features());
        self.values.extend_from_slice(values);
        self.drive.push(drive);
        self.day.push(day);
        self.partition_key.push(key);
    }
}

/// Per drive-day SSD features: daily counts and their running sums, wear and
/// bad-block counters, and drive age. Swap rows without telemetry produce no row.
pub fn make_features_ssd(ds: &FleetDataset) -> Result<FeatureRows> {
    let drives = ds.ssd_drives()?;
    let spec = FeatureSpec::ssd_default();
    let mut out = FeatureRows::new(spec);
    let n_base = SSD_DAILY.len() + ErrorKind::ALL.len();
    let mut row = vec![0.0; out.n_features()];
    for (idx, (id, recs)) in drives.iter().enumerate() {
        let Some(first) = recs.first() else { continue };
        out.drives.push(DriveInfo {
            id: id.clone(),
            model: first.model.to_string(),
        });
        let mut cum = vec![0.0; n_base];
        for r in recs {
            let Some(s) = &r.summary else { continue };
            let daily = [s.read_ops as f64, s.write_ops as f64, s.erase_ops as f64]
                .into_iter()
                .chain(s.errors.0.iter().map(|&c| c as f64));
            for (b, v) in daily.enumerate() {
                cum[b] += v;
                row[2 * b] = v;
                row[2 * b + 1] = cum[b];
            }
            let tail = 2 * n_base;
            row[tail] = s.pe_cycles_cum as f64;
            row[tail + 1] = s.bad_blocks_factory_cum as f64;
            row[tail + 2] = s.bad_blocks_new_cum as f64;
            row[tail + 3] = r.day() as f64;
            out.push(idx as u32, r.day(), r.day() as f64, &row);
        }
    }
    Ok(out)
}

/// Per drive-day HDD features.
///
/// Missing SMART values carry the last observed value forward, or 0 when
/// never observed. `smart_<id>_diff` is the increase since the previous
/// observation (0 on the first one); a decrease is clamped to 0 and raises
/// `counter_reset`. `smart_<id>_cum` is the running maximum of the counter.
/// The partition key is the maximum head flying hours (SMART 240) seen so far.
pub fn make_features_hdd(ds: &FleetDataset, spec: &FeatureSpec) -> Result<FeatureRows> {
    if spec.family != Family::Hdd {
        return Err(Error::Family {
            expected: Family::Hdd,
            found: spec.family,
        });
    }
    let drives = ds.hdd_drives()?;
    let mut out = FeatureRows::new(spec.clone());
    let mut row = vec![0.0; out.n_features()];
    let n_raw = SMART_IDS.len();
    let diff_slots: Vec<usize> = spec.diff_ids.iter().map(|&id| SmartValues::slot(id).unwrap()).collect();
    let cum_slots: Vec<usize> = spec
        .cumulative_ids
        .iter()
        .map(|&id| SmartValues::slot(id).unwrap())
        .collect();
    for (idx, (id, recs)) in drives.iter().enumerate() {
        let Some(first) = recs.first() else { continue };
        out.drives.push(DriveInfo {
            id: id.clone(),
            model: first.model.to_string(),
        });
        let mut last: Vec<Option<u64>> = vec![None; n_raw];
        let mut running_max: Vec<u64> = vec![0; n_raw];
        let mut hfh_max = 0.0f64;
        for r in recs {
            let mut reset = false;
            for (k, &slot) in diff_slots.iter().enumerate() {
                let now = r.smart_raw.get(SMART_IDS[slot]);
                row[n_raw + k] = match (now, last[slot]) {
                    (Some(v), Some(prev)) if v >= prev => (v - prev) as f64,
                    (Some(_), Some(_)) => {
                        reset = true;
                        0.0
                    }
                    _ => 0.0,
                };
            }
            for (slot, &sid) in SMART_IDS.iter().enumerate() {
                if let Some(v) = r.smart_raw.get(sid) {
                    last[slot] = Some(v);
                    running_max[slot] = running_max[slot].max(v);
                }
                row[slot] = last[slot].unwrap_or(0) as f64;
            }
            for (k, &slot) in cum_slots.iter().enumerate() {
                row[n_raw + diff_slots.len() + k] = running_max[slot] as f64;
            }
            *row.last_mut().unwrap() = reset as u8 as f64;
            out.resets += reset as usize;
            if let Some(h) = r.smart_raw.get(240) {
                hfh_max = hfh_max.max(h as f64);
            }
            out.push(idx as u32, (r.date - first.date).num_days(), hfh_max, &row);
        }
    }
    Ok(out)
}

pub fn make_features(ds: &FleetDataset) -> Result<FeatureRows> {
    match ds.family() {
        Family::Ssd => make_features_ssd(ds),
        Family::Hdd => make_features_hdd(ds, &FeatureSpec::hdd_default()),
    }
}

/// Labeled examples in the same compact layout as [`FeatureRows`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleSet {
    pub names: Vec<String>,
    pub drives: Vec<DriveInfo>,
    pub values: Vec<f64>,
    pub labels: Vec<bool>,
    pub drive: Vec<u32>,
    pub day: Vec<i64>,
    pub partition_key: Vec<f64>,
    pub key_attribute: PartitionAttribute,
    pub lookahead: Option<u32>,
}

/// One labeled drive-day, owned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub drive: DriveId,
    pub day: i64,
    pub features: Vec<f64>,
    pub label: bool,
    pub partition_key: f64,
}

impl ExampleSet {
    pub fn empty_like(&self) -> Self {
        ExampleSet {
            names: self.names.clone(),
            drives: self.drives.clone(),
            values: Vec::new(),
            labels: Vec::new(),
            drive: Vec::new(),
            day: Vec::new(),
            partition_key: Vec::new(),
            key_attribute: self.key_attribute,
            lookahead: self.lookahead,
        }
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_features();
        &self.values[i * p..(i + 1) * p]
    }

    pub fn drive_id(&self, i: usize) -> &DriveId {
        &self.drives[self.drive[i] as usize].id
    }

    pub fn drive_model(&self, i: usize) -> &str {
        &self.drives[self.drive[i] as usize].model
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn example(&self, i: usize) -> LabeledExample {
        LabeledExample {
            drive: self.drive_id(i).clone(),
            day: self.day[i],
            features: self.row(i).to_vec(),
            label: self.labels[i],
            partition_key: self.partition_key[i],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = LabeledExample> + '_ {
        (0..self.len()).map(|i| self.example(i))
    }

    fn push_from(&mut self, src: &ExampleSet, i: usize) {
        self.values.extend_from_slice(src.row(i));
        self.labels.push(src.labels[i]);
        self.drive.push(src.drive[i]);
        self.day.push(src.day[i]);
        self.partition_key.push(src.partition_key[i]);
    }

    /// Copy of the selected examples, in the given order.
    pub fn subset(&self, indices: &[usize]) -> ExampleSet {
        let mut out = self.empty_like();
        out.values.reserve(indices.len() * self.n_features());
        for &i in indices {
            out.push_from(self, i);
        }
        out
    }

    /// Write `examples_<family>_N<k>.csv` layout: features then `label,drive_id,day,partition_key`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = self.names.clone();
        header.extend(["label", "drive_id", "day", "partition_key"].map(String::from));
        w.write_record(&header)?;
        let mut fields = Vec::with_capacity(header.len());
        for i in 0..self.len() {
            fields.clear();
            fields.extend(self.row(i).iter().map(|v| v.to_string()));
            fields.push((self.labels[i] as u8).to_string());
            fields.push(self.drive_id(i).to_string());
            fields.push(self.day[i].to_string());
            fields.push(self.partition_key[i].to_string());
            w.write_record(&fields)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Attach "fails within `lookahead` days" labels.
///
/// A row on day `d` is positive iff one of the drive's failures falls on
/// `d..=d + lookahead`. Rows after a failure and up to its swap produce no
/// example. When no row exists on a failure day, the last earlier row of the
/// same operational period is labeled positive.
pub fn label_lookahead(rows: &FeatureRows, failures: &[FailureEvent], lookahead: u32) -> ExampleSet {
    let index: BTreeMap<&str, u32> = rows
        .drives
        .iter()
        .enumerate()
        .map(|(i, d)| (d.id.as_ref(), i as u32))
        .collect();
    let mut by_drive: Vec<Vec<&FailureEvent>> = vec![Vec::new(); rows.drives.len()];
    for f in failures {
        if let Some(&i) = index.get(f.drive.as_ref()) {
            by_drive[i as usize].push(f);
        }
    }
    for v in &mut by_drive {
        v.sort_by_key(|f| f.day);
    }

    let n = lookahead as i64;
    let mut out = ExampleSet {
        names: rows.spec.names.clone(),
        drives: rows.drives.clone(),
        values: Vec::with_capacity(rows.values.len()),
        labels: Vec::with_capacity(rows.len()),
        drive: Vec::with_capacity(rows.len()),
        day: Vec::with_capacity(rows.len()),
        partition_key: Vec::with_capacity(rows.len()),
        key_attribute: rows.key_attribute,
        lookahead: Some(lookahead),
    };

    let mut i = 0;
    while i < rows.len() {
        let drive = rows.drive[i];
        let start = i;
        while i < rows.len() && rows.drive[i] == drive {
            i += 1;
        }
        let fails = &by_drive[drive as usize];
        let first_out = out.len();
        for r in start..i {
            let d = rows.day[r];
            let down = fails
                .iter()
                .any(|f| f.swap_day.is_some_and(|s| d > f.day && d <= s));
            if down {
                continue;
            }
            let label = fails.iter().any(|f| f.day >= d && f.day <= d + n);
            out.values.extend_from_slice(rows.row(r));
            out.labels.push(label);
            out.drive.push(drive);
            out.day.push(d);
            out.partition_key.push(rows.partition_key[r]);
        }
        // failures that landed on a day without a row
        for f in fails {
            if out.day[first_out..].binary_search(&f.day).is_ok() {
                continue;
            }
            let prev_fail = fails.iter().filter(|g| g.day < f.day).map(|g| g.day).max();
            let pos = out.day[first_out..].partition_point(|&d| d < f.day);
            if pos > 0 {
                let j = first_out + pos - 1;
                if prev_fail.is_none_or(|p| out.day[j] > p) {
                    out.labels[j] = true;
                }
            }
        }
    }
    out
}

/// Split by the partition key: `key <= threshold` goes below, the rest above.
/// Input order is preserved on each side.
pub fn partition_dataset(examples: &ExampleSet, rule: &PartitionRule) -> Result<(ExampleSet, ExampleSet)> {
    if rule.attribute != examples.key_attribute {
        return Err(Error::Argument(format!(
            "examples are keyed by {:?}, rule partitions by {:?}",
            examples.key_attribute, rule.attribute
        )));
    }
    let (below, above): (Vec<usize>, Vec<usize>) =
        (0..examples.len()).partition(|&i| examples.partition_key[i] <= rule.threshold);
    Ok((examples.subset(&below), examples.subset(&above)))
}

/// Indices (not copies) of the two sides of a partition.
pub fn partition_indices(examples: &ExampleSet, rule: &PartitionRule) -> Result<(Vec<usize>, Vec<usize>)> {
    if rule.attribute != examples.key_attribute {
        return Err(Error::Argument(format!(
            "examples are keyed by {:?}, rule partitions by {:?}",
            examples.key_attribute, rule.attribute
        )));
    }
    Ok((0..examples.len()).partition(|&i| examples.partition_key[i] <= rule.threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{DailySummary, HddDailyRecord, Provenance, SsdDailyRecord, SsdModel, US_PER_DAY};
    use chrono::NaiveDate;
    use std::sync::Arc;

    fn ssd_rec(day: u64, read: u64, write: u64, ue: u32) -> SsdDailyRecord {
        let mut s = DailySummary {
            read_ops: read,
            write_ops: write,
            erase_ops: 1,
            pe_cycles_cum: day,
            ..Default::default()
        };
        s.errors.set(ErrorKind::Uncorrectable, ue);
        SsdDailyRecord {
            drive_id: Arc::from("a"),
            model: SsdModel::MlcB,
            timestamp_us: day * US_PER_DAY,
            summary: Some(s),
            swap_event: false,
        }
    }

    #[test]
    fn ssd_running_sums() {
        let mut drives = crate::ingest::SsdDrives::new();
        drives.insert(
            Arc::from("a"),
            vec![ssd_rec(0, 10, 1, 0), ssd_rec(1, 5, 2, 3), ssd_rec(2, 0, 0, 1)],
        );
        let ds = FleetDataset::ssd(drives, Provenance::default());
        let rows = make_features_ssd(&ds).unwrap();
        let spec = &rows.spec;
        assert_eq!(spec.names.len(), 30);
        let col = |name: &str| rows.column(spec.index_of(name).unwrap());
        assert_eq!(col("read_ops"), vec![10.0, 5.0, 0.0]);
        assert_eq!(col("read_ops_cum"), vec![10.0, 15.0, 15.0]);
        assert_eq!(col("write_ops_cum"), vec![1.0, 3.0, 3.0]);
        assert_eq!(col("err_uncorrectable"), vec![0.0, 3.0, 1.0]);
        assert_eq!(col("err_uncorrectable_cum"), vec![0.0, 3.0, 4.0]);
        assert_eq!(col("erase_ops_cum"), vec![1.0, 2.0, 3.0]);
        assert_eq!(col("pe_cycles_cum"), vec![0.0, 1.0, 2.0]);
        assert_eq!(col("age_days"), vec![0.0, 1.0, 2.0]);
        assert_eq!(rows.partition_key, vec![0.0, 1.0, 2.0]);
    }

    fn hdd_rows(values: &[(u16, &[Option<u64>])]) -> FeatureRows {
        let n = values[0].1.len();
        let start = NaiveDate::from_ymd_opt(2016, 1, 1).unwrap();
        let recs: Vec<HddDailyRecord> = (0..n)
            .map(|i| HddDailyRecord {
                date: start + chrono::Days::new(i as u64),
                serial: Arc::from("h"),
                model: Arc::from("M"),
                capacity_bytes: None,
                failed_today: false,
                smart_raw: values
                    .iter()
                    .filter_map(|(id, seq)| seq[i].map(|v| (*id, v)))
                    .collect(),
            })
            .collect();
        let mut drives = crate::ingest::HddDrives::new();
        drives.insert(Arc::from("h"), recs);
        make_features_hdd(&FleetDataset::hdd(drives, Provenance::default()), &FeatureSpec::hdd_default()).unwrap()
    }

    #[test]
    fn hdd_diff_rule() {
        let rows = hdd_rows(&[(9, &[Some(100), Some(124)])]);
        let j = rows.spec.index_of("smart_9_diff").unwrap();
        assert_eq!(rows.column(j), vec![0.0, 24.0]);
    }

    #[test]
    fn hdd_gap_carries_forward() {
        let rows = hdd_rows(&[(5, &[Some(2), None, Some(7)])]);
        let raw = rows.spec.index_of("smart_5_raw").unwrap();
        let diff = rows.spec.index_of("smart_5_diff").unwrap();
        assert_eq!(rows.column(raw), vec![2.0, 2.0, 7.0]);
        assert_eq!(rows.column(diff), vec![0.0, 0.0, 5.0]);
        // never observed attributes impute 0
        assert_eq!(rows.column(rows.spec.index_of("smart_1_raw").unwrap()), vec![0.0; 3]);
    }

    #[test]
    fn hdd_counter_reset_clamped() {
        let rows = hdd_rows(&[(193, &[Some(50), Some(10), Some(12)]), (187, &[Some(4), Some(1), Some(2)])]);
        let diff = rows.spec.index_of("smart_193_diff").unwrap();
        let reset = rows.spec.index_of("counter_reset").unwrap();
        let cum = rows.spec.index_of("smart_187_cum").unwrap();
        assert_eq!(rows.column(diff), vec![0.0, 0.0, 2.0]);
        assert_eq!(rows.column(reset), vec![0.0, 1.0, 0.0]);
        assert_eq!(rows.column(cum), vec![4.0, 4.0, 4.0]);
        assert_eq!(rows.resets, 1);
    }

    #[test]
    fn hdd_partition_key_is_running_hfh_max() {
        let rows = hdd_rows(&[(240, &[Some(10), None, Some(5), Some(30)])]);
        assert_eq!(rows.partition_key, vec![10.0, 10.0, 10.0, 30.0]);
        assert_eq!(rows.key_attribute, PartitionAttribute::HeadFlyingHours);
    }

    #[test]
    fn spec_validation() {
        assert!(FeatureSpec::hdd(vec![1], vec![187]).is_err());
        assert!(FeatureSpec::hdd(vec![5], vec![]).is_err());
        assert!(FeatureSpec::hdd(vec![5], vec![187, 5]).is_ok());
        let names = FeatureSpec::hdd_default().names;
        let unique: std::collections::BTreeSet<_> = names.iter().collect();
        assert_eq!(unique.len(), names.len());
    }

    fn simple_rows(days: &[i64]) -> FeatureRows {
        let mut rows = FeatureRows::new(FeatureSpec {
            family: Family::Ssd,
            names: vec!["x".into()],
            diff_ids: vec![],
            cumulative_ids: vec![],
        });
        rows.drives.push(DriveInfo {
            id: Arc::from("a"),
            model: "MLC-A".into(),
        });
        for &d in days {
            rows.push(0, d, d as f64, &[d as f64]);
        }
        rows
    }

    fn fail(day: i64, swap: Option<i64>) -> FailureEvent {
        FailureEvent {
            drive: Arc::from("a"),
            family: Family::Ssd,
            day,
            age_days: day,
            ordinal: 1,
            swap_day: swap,
            degenerate: false,
        }
    }

    fn positive_days(ex: &ExampleSet) -> Vec<i64> {
        (0..ex.len()).filter(|&i| ex.labels[i]).map(|i| ex.day[i]).collect()
    }

    #[test]
    fn lookahead_windows() {
        let rows = simple_rows(&(0..=10).collect::<Vec<_>>());
        let f = [fail(8, None)];
        assert_eq!(positive_days(&label_lookahead(&rows, &f, 0)), vec![8]);
        assert_eq!(positive_days(&label_lookahead(&rows, &f, 2)), vec![6, 7, 8]);
        assert!(positive_days(&label_lookahead(&rows, &[], 7)).is_empty());
    }

    #[test]
    fn down_days_produce_no_examples() {
        let rows = simple_rows(&[0, 1, 2, 3, 4, 20, 21]);
        let ex = label_lookahead(&rows, &[fail(2, Some(6))], 0);
        assert_eq!(ex.day, vec![0, 1, 2, 20, 21]);
        assert_eq!(positive_days(&ex), vec![2]);
    }

    #[test]
    fn failure_without_row_labels_previous_row() {
        let rows = simple_rows(&[0, 1, 2, 10]);
        let ex = label_lookahead(&rows, &[fail(4, Some(6))], 0);
        assert_eq!(positive_days(&ex), vec![2]);
    }

    #[test]
    fn partition_boundary_and_order() {
        let rows = simple_rows(&[95, 10, 90, 91, 3]);
        let ex = label_lookahead(&rows, &[], 0);
        let (below, above) = partition_dataset(&ex, &PartitionRule::age(90.0)).unwrap();
        assert_eq!(below.day, vec![10, 90, 3]);
        assert_eq!(above.day, vec![95, 91]);
        assert!(partition_dataset(&ex, &PartitionRule::hfh(40_000.0)).is_err());
    }

    #[test]
    fn partition_rule_parse() {
        assert_eq!("age:90".parse::<PartitionRule>().unwrap(), PartitionRule::age(90.0));
        assert_eq!("hfh:40000".parse::<PartitionRule>().unwrap(), PartitionRule::hfh(40_000.0));
        assert!("age:0".parse::<PartitionRule>().is_err());
        assert!("size:3".parse::<PartitionRule>().is_err());
    }
}
