//! Parsing, validation and filtering of raw daily drive telemetry.
//!
//! Two input formats are understood:
//!
//! - HDD: Backblaze daily snapshot CSV (`date,serial_number,model,capacity_bytes,failure,smart_<id>_normalized,smart_<id>_raw,...`).
//!   Only the `smart_<id>_raw` columns are consumed; empty cells stay absent.
//! - SSD: the canonical CSV below, one row per drive-day, booleans as `0/1`.
//!   A day without telemetry has no row. A swap row may leave every
//!   telemetry field empty.
//!
//! ```text
//! drive_id,model,timestamp_us,read_ops,write_ops,erase_ops,pe_cycles_cum,dead,read_only,
//! bad_blocks_factory_cum,bad_blocks_new_cum,err_correctable,err_erase,err_final_read,
//! err_final_write,err_meta,err_read,err_response,err_timeout,err_uncorrectable,err_write,swap_event
//! ```
//!
//! Lines starting with `#` are comments in both formats.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::sync::Arc;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type DriveId = Arc<str>;

pub const US_PER_DAY: u64 = 86_400_000_000;

/// SMART attributes whose raw value is consumed from HDD snapshots.
pub const SMART_IDS: [u16; 20] = [
    1, 3, 4, 5, 7, 9, 10, 12, 187, 188, 190, 192, 193, 194, 197, 198, 199, 240, 241, 242,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Hdd,
    Ssd,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Hdd => "hdd",
            Family::Ssd => "ssd",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hdd" => Ok(Family::Hdd),
            "ssd" => Ok(Family::Ssd),
            other => Err(Error::Argument(format!("unknown family {other:?}"))),
        }
    }
}

/// Raw SMART values keyed by attribute id; only ids in [`SMART_IDS`] are kept.
#[derive(Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmartValues {
    present: u32,
    values: [u64; SMART_IDS.len()],
}

impl SmartValues {
    pub fn slot(id: u16) -> Option<usize> {
        SMART_IDS.iter().position(|&s| s == id)
    }

    pub fn get(&self, id: u16) -> Option<u64> {
        let slot = Self::slot(id)?;
        (self.present & (1 << slot) != 0).then(|| self.values[slot])
    }

    /// Returns false when `id` is not a tracked attribute.
    pub fn insert(&mut self, id: u16, value: u64) -> bool {
        match Self::slot(id) {
            Some(slot) => {
                self.present |= 1 << slot;
                self.values[slot] = value;
                true
            }
            None => false,
        }
    }

    pub fn remove(&mut self, id: u16) {
        if let Some(slot) = Self::slot(id) {
            self.present &= !(1 << slot);
            self.values[slot] = 0;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u16, u64)> + '_ {
        SMART_IDS
            .iter()
            .enumerate()
            .filter(|(slot, _)| self.present & (1 << slot) != 0)
            .map(|(slot, &id)| (id, self.values[slot]))
    }

    pub fn len(&self) -> usize {
        self.present.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.present == 0
    }
}

impl fmt::Debug for SmartValues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

impl FromIterator<(u16, u64)> for SmartValues {
    fn from_iter<I: IntoIterator<Item = (u16, u64)>>(iter: I) -> Self {
        let mut s = SmartValues::default();
        for (id, v) in iter {
            s.insert(id, v);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HddDailyRecord {
    pub date: NaiveDate,
    pub serial: DriveId,
    pub model: Arc<str>,
    pub capacity_bytes: Option<i64>,
    pub failed_today: bool,
    pub smart_raw: SmartValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SsdModel {
    #[serde(rename = "MLC-A")]
    MlcA,
    #[serde(rename = "MLC-B")]
    MlcB,
    #[serde(rename = "MLC-D")]
    MlcD,
}

impl SsdModel {
    pub const ALL: [SsdModel; 3] = [SsdModel::MlcA, SsdModel::MlcB, SsdModel::MlcD];

    pub fn as_str(self) -> &'static str {
        match self {
            SsdModel::MlcA => "MLC-A",
            SsdModel::MlcB => "MLC-B",
            SsdModel::MlcD => "MLC-D",
        }
    }
}

impl fmt::Display for SsdModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SsdModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SsdModel::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Argument(format!("unknown SSD model {s:?}")))
    }
}

/// The ten logged SSD error kinds, in canonical column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Correctable,
    Erase,
    FinalRead,
    FinalWrite,
    Meta,
    Read,
    Response,
    Timeout,
    Uncorrectable,
    Write,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 10] = [
        ErrorKind::Correctable,
        ErrorKind::Erase,
        ErrorKind::FinalRead,
        ErrorKind::FinalWrite,
        ErrorKind::Meta,
        ErrorKind::Read,
        ErrorKind::Response,
        ErrorKind::Timeout,
        ErrorKind::Uncorrectable,
        ErrorKind::Write,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Correctable => "correctable",
            ErrorKind::Erase => "erase",
            ErrorKind::FinalRead => "final_read",
            ErrorKind::FinalWrite => "final_write",
            ErrorKind::Meta => "meta",
            ErrorKind::Read => "read",
            ErrorKind::Response => "response",
            ErrorKind::Timeout => "timeout",
            ErrorKind::Uncorrectable => "uncorrectable",
            ErrorKind::Write => "write",
        }
    }

    /// Errors hidden from the user by retries or ECC.
    pub fn is_transparent(self) -> bool {
        matches!(
            self,
            ErrorKind::Correctable | ErrorKind::Erase | ErrorKind::Read | ErrorKind::Write
        )
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.strip_prefix("err_").unwrap_or(s);
        ErrorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Argument(format!("unknown error kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorCounts(pub [u32; 10]);

impl ErrorCounts {
    pub fn get(&self, kind: ErrorKind) -> u32 {
        self.0[kind.index()]
    }

    pub fn set(&mut self, kind: ErrorKind, count: u32) {
        self.0[kind.index()] = count;
    }

    pub fn add(&mut self, kind: ErrorKind, count: u32) {
        let slot = &mut self.0[kind.index()];
        *slot = slot.saturating_add(count);
    }
}

/// Telemetry carried by a drive-day that has a performance summary.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailySummary {
    pub read_ops: u64,
    pub write_ops: u64,
    pub erase_ops: u64,
    pub pe_cycles_cum: u64,
    pub dead: bool,
    pub read_only: bool,
    pub bad_blocks_factory_cum: u64,
    pub bad_blocks_new_cum: u64,
    pub errors: ErrorCounts,
}

impl DailySummary {
    /// Any read or write was provisioned to the drive that day.
    pub fn is_active(&self) -> bool {
        self.read_ops > 0 || self.write_ops > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsdDailyRecord {
    pub drive_id: DriveId,
    pub model: SsdModel,
    /// Microseconds since the start of the drive's lifetime.
    pub timestamp_us: u64,
    /// `None` only on swap rows logged without a performance summary.
    pub summary: Option<DailySummary>,
    pub swap_event: bool,
}

impl SsdDailyRecord {
    /// Drive-age day of this record.
    pub fn day(&self) -> i64 {
        (self.timestamp_us / US_PER_DAY) as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedRow {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarantinedDrive {
    pub drive: DriveId,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub filters: Vec<String>,
    pub data_rows: u64,
    pub rejected: Vec<RejectedRow>,
    pub quarantined: Vec<QuarantinedDrive>,
}

impl Provenance {
    pub fn new(source: impl Into<String>) -> Self {
        Provenance {
            source: source.into(),
            ..Default::default()
        }
    }

    pub fn rejected_count(&self) -> u64 {
        self.rejected.len() as u64
    }
}

pub type HddDrives = BTreeMap<DriveId, Vec<HddDailyRecord>>;
pub type SsdDrives = BTreeMap<DriveId, Vec<SsdDailyRecord>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FleetRecords {
    Hdd(HddDrives),
    Ssd(SsdDrives),
}

/// Per-drive, time-ordered daily records of one device family.
#[derive(Debug, Clone)]
pub struct FleetDataset {
    pub records: FleetRecords,
    pub provenance: Provenance,
}

impl PartialEq for FleetDataset {
    /// Datasets compare by content; provenance is bookkeeping.
    fn eq(&self, other: &Self) -> bool {
        self.records == other.records
    }
}

impl FleetDataset {
    pub fn hdd(drives: HddDrives, provenance: Provenance) -> Self {
        FleetDataset {
            records: FleetRecords::Hdd(drives),
            provenance,
        }
    }

    pub fn ssd(drives: SsdDrives, provenance: Provenance) -> Self {
        FleetDataset {
            records: FleetRecords::Ssd(drives),
            provenance,
        }
    }

    pub fn family(&self) -> Family {
        match self.records {
            FleetRecords::Hdd(_) => Family::Hdd,
            FleetRecords::Ssd(_) => Family::Ssd,
        }
    }

    pub fn hdd_drives(&self) -> Result<&HddDrives> {
        match &self.records {
            FleetRecords::Hdd(d) => Ok(d),
            FleetRecords::Ssd(_) => Err(Error::Family {
                expected: Family::Hdd,
                found: Family::Ssd,
            }),
        }
    }

    pub fn ssd_drives(&self) -> Result<&SsdDrives> {
        match &self.records {
            FleetRecords::Ssd(d) => Ok(d),
            FleetRecords::Hdd(_) => Err(Error::Family {
                expected: Family::Ssd,
                found: Family::Hdd,
            }),
        }
    }

    pub fn drive_count(&self) -> usize {
        match &self.records {
            FleetRecords::Hdd(d) => d.len(),
            FleetRecords::Ssd(d) => d.len(),
        }
    }

    pub fn record_count(&self) -> usize {
        match &self.records {
            FleetRecords::Hdd(d) => d.values().map(Vec::len).sum(),
            FleetRecords::Ssd(d) => d.values().map(Vec::len).sum(),
        }
    }

    pub fn drive_ids(&self) -> Vec<DriveId> {
        match &self.records {
            FleetRecords::Hdd(d) => d.keys().cloned().collect(),
            FleetRecords::Ssd(d) => d.keys().cloned().collect(),
        }
    }

    /// Model name per drive (the model of the drive's first record).
    pub fn drive_models(&self) -> BTreeMap<DriveId, String> {
        match &self.records {
            FleetRecords::Hdd(d) => d
                .iter()
                .filter_map(|(k, v)| v.first().map(|r| (k.clone(), r.model.to_string())))
                .collect(),
            FleetRecords::Ssd(d) => d
                .iter()
                .filter_map(|(k, v)| v.first().map(|r| (k.clone(), r.model.to_string())))
                .collect(),
        }
    }
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn parse_bool(field: &str) -> std::result::Result<bool, String> {
    match field {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(format!("expected 0 or 1, found {other:?}")),
    }
}

fn parse_count(field: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = field.parse::<u64>() {
        return Ok(v);
    }
    // Some snapshot vintages write integral raw values as floats.
    match field.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        Ok(_) => Err(format!("expected a non-negative integer, found {field:?}")),
        Err(_) => Err(format!("unparseable count {field:?}")),
    }
}

struct HddColumns {
    date: usize,
    serial: usize,
    model: usize,
    failure: usize,
    capacity: Option<usize>,
    smart: Vec<(u16, usize)>,
}

impl HddColumns {
    fn from_header(header: &csv::StringRecord) -> Result<Self> {
        let find = |names: &[&str]| header.iter().position(|h| names.contains(&h));
        let need = |names: &[&str]| {
            find(names).ok_or_else(|| Error::Schema(format!("missing mandatory column {:?}", names[0])))
        };
        let mut smart = Vec::new();
        for (idx, name) in header.iter().enumerate() {
            let Some(id) = name
                .strip_prefix("smart_")
                .and_then(|s| s.strip_suffix("_raw"))
                .and_then(|s| s.parse::<u16>().ok())
            else {
                continue;
            };
            if SmartValues::slot(id).is_some() {
                smart.push((id, idx));
            }
        }
        Ok(HddColumns {
            date: need(&["date"])?,
            serial: need(&["serial_number", "serial"])?,
            model: need(&["model"])?,
            failure: need(&["failure"])?,
            capacity: find(&["capacity_bytes"]),
            smart,
        })
    }
}

/// Parse a Backblaze-style daily snapshot CSV.
///
/// Malformed rows (wrong field count, unparseable date/flag/count, duplicate
/// `(serial, date)`) are skipped and listed in the provenance with their line
/// number. A missing mandatory column is a schema error.
pub fn parse_hdd_csv<R: Read>(input: R, source: &str) -> Result<FleetDataset> {
    let mut reader = csv_reader(input);
    let header = reader.headers()?.clone();
    let cols = HddColumns::from_header(&header)?;
    let mut prov = Provenance::new(source);
    let mut drives: HashMap<DriveId, Vec<HddDailyRecord>> = HashMap::new();
    let mut seen: BTreeSet<(DriveId, NaiveDate)> = BTreeSet::new();
    let mut models: HashMap<String, Arc<str>> = HashMap::new();

    for row in reader.records() {
        prov.data_rows += 1;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                prov.rejected.push(RejectedRow {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        match parse_hdd_row(&row, &header, &cols, &mut models) {
            Ok(rec) => {
                if !seen.insert((rec.serial.clone(), rec.date)) {
                    prov.rejected.push(RejectedRow {
                        line,
                        reason: format!("duplicate record for {} on {}", rec.serial, rec.date),
                    });
                    continue;
                }
                drives.entry(rec.serial.clone()).or_default().push(rec);
            }
            Err(reason) => prov.rejected.push(RejectedRow { line, reason }),
        }
    }

    let drives = drives
        .into_iter()
        .map(|(id, mut recs)| {
            recs.sort_by_key(|r| r.date);
            (id, recs)
        })
        .collect();
    Ok(FleetDataset::hdd(drives, prov))
}

fn parse_hdd_row(
    row: &csv::StringRecord,
    header: &csv::StringRecord,
    cols: &HddColumns,
    models: &mut HashMap<String, Arc<str>>,
) -> std::result::Result<HddDailyRecord, String> {
    if row.len() != header.len() {
        return Err(format!("expected {} fields, found {}", header.len(), row.len()));
    }
    let date = NaiveDate::parse_from_str(&row[cols.date], "%Y-%m-%d")
        .map_err(|_| format!("unparseable date {:?}", &row[cols.date]))?;
    let serial = &row[cols.serial];
    if serial.is_empty() {
        return Err("empty serial number".into());
    }
    let failed_today = parse_bool(&row[cols.failure])?;
    let capacity_bytes = match cols.capacity.map(|c| &row[c]) {
        None | Some("") => None,
        Some(v) => Some(v.parse::<i64>().map_err(|_| format!("unparseable capacity {v:?}"))?),
    };
    let mut smart_raw = SmartValues::default();
    for &(id, idx) in &cols.smart {
        let cell = &row[idx];
        if cell.is_empty() {
            continue;
        }
        smart_raw.insert(id, parse_count(cell).map_err(|e| format!("smart_{id}_raw: {e}"))?);
    }
    let model = models
        .entry(row[cols.model].to_string())
        .or_insert_with(|| Arc::from(&row[cols.model]))
        .clone();
    Ok(HddDailyRecord {
        date,
        serial: Arc::from(serial),
        model,
        capacity_bytes,
        failed_today,
        smart_raw,
    })
}

pub const SSD_COLUMNS: [&str; 22] = [
    "drive_id",
    "model",
    "timestamp_us",
    "read_ops",
    "write_ops",
    "erase_ops",
    "pe_cycles_cum",
    "dead",
    "read_only",
    "bad_blocks_factory_cum",
    "bad_blocks_new_cum",
    "err_correctable",
    "err_erase",
    "err_final_read",
    "err_final_write",
    "err_meta",
    "err_read",
    "err_response",
    "err_timeout",
    "err_uncorrectable",
    "err_write",
    "swap_event",
];

// Telemetry columns are SSD_COLUMNS[3..21].
const SUMMARY_COLUMNS: std::ops::Range<usize> = 3..21;

/// Parse the canonical SSD CSV.
///
/// Drives whose cumulative counters decrease, or that log two rows on the
/// same day, are quarantined: excluded from the dataset and listed in the
/// provenance.
pub fn parse_ssd_log<R: Read>(input: R, source: &str) -> Result<FleetDataset> {
    let mut reader = csv_reader(input);
    let header = reader.headers()?.clone();
    let mut index = [0usize; SSD_COLUMNS.len()];
    for (slot, name) in SSD_COLUMNS.iter().enumerate() {
        index[slot] = header
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| Error::Schema(format!("missing mandatory column {name:?}")))?;
    }
    let mut prov = Provenance::new(source);
    let mut drives: HashMap<DriveId, Vec<SsdDailyRecord>> = HashMap::new();
    let mut ids: HashMap<String, DriveId> = HashMap::new();

    for row in reader.records() {
        prov.data_rows += 1;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                prov.rejected.push(RejectedRow {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != header.len() {
            prov.rejected.push(RejectedRow {
                line,
                reason: format!("expected {} fields, found {}", header.len(), row.len()),
            });
            continue;
        }
        let fields: Vec<&str> = index.iter().map(|&i| &row[i]).collect();
        match parse_ssd_row(&fields, &mut ids) {
            Ok(rec) => drives.entry(rec.drive_id.clone()).or_default().push(rec),
            Err(reason) => prov.rejected.push(RejectedRow { line, reason }),
        }
    }

    let mut accepted = SsdDrives::new();
    let mut quarantined = Vec::new();
    for (id, mut recs) in drives {
        recs.sort_by_key(|r| r.timestamp_us);
        match check_ssd_sequence(&recs) {
            Ok(()) => {
                accepted.insert(id, recs);
            }
            Err(reason) => quarantined.push(QuarantinedDrive { drive: id, reason }),
        }
    }
    quarantined.sort_by(|a, b| a.drive.cmp(&b.drive));
    prov.quarantined = quarantined;
    Ok(FleetDataset::ssd(accepted, prov))
}

fn parse_ssd_row(
    f: &[&str],
    ids: &mut HashMap<String, DriveId>,
) -> std::result::Result<SsdDailyRecord, String> {
    if f[0].is_empty() {
        return Err("empty drive_id".into());
    }
    let model: SsdModel = f[1].parse().map_err(|e: Error| e.to_string())?;
    let timestamp_us = f[2]
        .parse::<u64>()
        .map_err(|_| format!("unparseable timestamp_us {:?}", f[2]))?;
    let swap_event = parse_bool(f[21]).map_err(|e| format!("swap_event: {e}"))?;

    let telemetry = &f[SUMMARY_COLUMNS];
    let empty = telemetry.iter().filter(|c| c.is_empty()).count();
    let summary = if empty == telemetry.len() {
        if !swap_event {
            return Err("row without telemetry must be a swap event".into());
        }
        None
    } else if empty > 0 {
        return Err("partially empty telemetry".into());
    } else {
        let num = |i: usize| parse_count(f[i]).map_err(|e| format!("{}: {e}", SSD_COLUMNS[i]));
        let flag = |i: usize| parse_bool(f[i]).map_err(|e| format!("{}: {e}", SSD_COLUMNS[i]));
        let mut errors = ErrorCounts::default();
        for (k, kind) in ErrorKind::ALL.into_iter().enumerate() {
            let v = num(11 + k)?;
            errors.set(kind, u32::try_from(v).map_err(|_| format!("error count {v} too large"))?);
        }
        Some(DailySummary {
            read_ops: num(3)?,
            write_ops: num(4)?,
            erase_ops: num(5)?,
            pe_cycles_cum: num(6)?,
            dead: flag(7)?,
            read_only: flag(8)?,
            bad_blocks_factory_cum: num(9)?,
            bad_blocks_new_cum: num(10)?,
            errors,
        })
    };
    let drive_id = ids
        .entry(f[0].to_string())
        .or_insert_with(|| Arc::from(f[0]))
        .clone();
    Ok(SsdDailyRecord {
        drive_id,
        model,
        timestamp_us,
        summary,
        swap_event,
    })
}

/// Records must be sorted by timestamp.
fn check_ssd_sequence(recs: &[SsdDailyRecord]) -> std::result::Result<(), String> {
    let mut prev: Option<&SsdDailyRecord> = None;
    let mut prev_summary: Option<&DailySummary> = None;
    for r in recs {
        if let Some(p) = prev {
            if r.day() == p.day() {
                return Err(format!("two records on day {}", r.day()));
            }
        }
        if let Some(s) = &r.summary {
            if let Some(ps) = prev_summary {
                for (name, now, before) in [
                    ("pe_cycles_cum", s.pe_cycles_cum, ps.pe_cycles_cum),
                    ("bad_blocks_factory_cum", s.bad_blocks_factory_cum, ps.bad_blocks_factory_cum),
                    ("bad_blocks_new_cum", s.bad_blocks_new_cum, ps.bad_blocks_new_cum),
                ] {
                    if now < before {
                        return Err(format!("{name} decreased from {before} to {now} on day {}", r.day()));
                    }
                }
            }
            prev_summary = Some(s);
        }
        prev = Some(r);
    }
    Ok(())
}

/// Combine HDD snapshot files parsed one at a time. A `(serial, date)` pair
/// seen in an earlier part is rejected in the later one.
pub fn merge_hdd(parts: Vec<FleetDataset>, source: &str) -> Result<FleetDataset> {
    let mut drives: HddDrives = BTreeMap::new();
    let mut prov = Provenance::new(source);
    for part in parts {
        let FleetDataset { records, provenance } = part;
        let FleetRecords::Hdd(part_drives) = records else {
            return Err(Error::Family {
                expected: Family::Hdd,
                found: Family::Ssd,
            });
        };
        prov.data_rows += provenance.data_rows;
        prov.rejected.extend(provenance.rejected.into_iter().map(|r| RejectedRow {
            line: r.line,
            reason: format!("{}: {}", provenance.source, r.reason),
        }));
        prov.quarantined.extend(provenance.quarantined);
        for (id, recs) in part_drives {
            let slot = drives.entry(id).or_default();
            for r in recs {
                match slot.binary_search_by_key(&r.date, |x| x.date) {
                    Ok(_) => prov.rejected.push(RejectedRow {
                        line: 0,
                        reason: format!("{}: duplicate record for {} on {}", provenance.source, r.serial, r.date),
                    }),
                    Err(at) => slot.insert(at, r),
                }
            }
        }
    }
    Ok(FleetDataset::hdd(drives, prov))
}

/// Keep HDD records of the given models within `[from, to]` (both inclusive).
pub fn filter_hdd(
    ds: &FleetDataset,
    models: &BTreeSet<String>,
    from: NaiveDate,
    to: NaiveDate,
) -> Result<FleetDataset> {
    if from > to {
        return Err(Error::Argument(format!("window start {from} is after end {to}")));
    }
    let drives = ds.hdd_drives()?;
    let kept: HddDrives = drives
        .iter()
        .filter_map(|(id, recs)| {
            let recs: Vec<_> = recs
                .iter()
                .filter(|r| models.contains(r.model.as_ref()) && r.date >= from && r.date <= to)
                .cloned()
                .collect();
            (!recs.is_empty()).then(|| (id.clone(), recs))
        })
        .collect();
    let mut prov = ds.provenance.clone();
    let names: Vec<&str> = models.iter().map(String::as_str).collect();
    prov.filters
        .push(format!("models={} window=[{from},{to}]", names.join("|")));
    Ok(FleetDataset::hdd(kept, prov))
}

/// Write HDD records as a snapshot CSV with one raw column per tracked SMART id.
pub fn write_hdd_csv<W: Write>(ds: &FleetDataset, out: W) -> Result<()> {
    let drives = ds.hdd_drives()?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["date", "serial_number", "model", "capacity_bytes", "failure"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(SMART_IDS.iter().map(|id| format!("smart_{id}_raw")));
    w.write_record(&header)?;
    let mut fields: Vec<String> = Vec::with_capacity(header.len());
    for recs in drives.values() {
        for r in recs {
            fields.clear();
            fields.push(r.date.format("%Y-%m-%d").to_string());
            fields.push(r.serial.to_string());
            fields.push(r.model.to_string());
            fields.push(r.capacity_bytes.map(|c| c.to_string()).unwrap_or_default());
            fields.push(if r.failed_today { "1" } else { "0" }.into());
            for id in SMART_IDS {
                fields.push(r.smart_raw.get(id).map(|v| v.to_string()).unwrap_or_default());
            }
            w.write_record(&fields)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Write SSD records in the canonical format.
pub fn write_ssd_csv<W: Write>(ds: &FleetDataset, out: W) -> Result<()> {
    let drives = ds.ssd_drives()?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SSD_COLUMNS)?;
    let mut fields: Vec<String> = Vec::with_capacity(SSD_COLUMNS.len());
    let b = |v: bool| if v { "1".to_string() } else { "0".to_string() };
    for recs in drives.values() {
        for r in recs {
            fields.clear();
            fields.push(r.drive_id.to_string());
            fields.push(r.model.to_string());
            fields.push(r.timestamp_us.to_string());
            match &r.summary {
                Some(s) => {
                    fields.push(s.read_ops.to_string());
                    fields.push(s.write_ops.to_string());
                    fields.push(s.erase_ops.to_string());
                    fields.push(s.pe_cycles_cum.to_string());
                    fields.push(b(s.dead));
                    fields.push(b(s.read_only));
                    fields.push(s.bad_blocks_factory_cum.to_string());
                    fields.push(s.bad_blocks_new_cum.to_string());
                    fields.extend(s.errors.0.iter().map(|c| c.to_string()));
                }
                None => fields.extend(SUMMARY_COLUMNS.map(|_| String::new())),
            }
            fields.push(b(r.swap_event));
            w.write_record(&fields)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Write either family in its canonical format.
pub fn write_canonical<W: Write>(ds: &FleetDataset, out: W) -> Result<()> {
    match ds.family() {
        Family::Hdd => write_hdd_csv(ds, out),
        Family::Ssd => write_ssd_csv(ds, out),
    }
}

pub fn parse_canonical<R: Read>(family: Family, input: R, source: &str) -> Result<FleetDataset> {
    match family {
        Family::Hdd => parse_hdd_csv(input, source),
        Family::Ssd => parse_ssd_log(input, source),
    }
}
