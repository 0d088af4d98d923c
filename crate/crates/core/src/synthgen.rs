//! Seeded synthetic fleets with planted reliability effects.
//!
//! Failures follow a piecewise-constant daily hazard per drive model,
//! scaled during infancy (drive age below `infant_days`) and, for HDDs,
//! above a head-flying-hours threshold. The base hazard of each model is
//! solved so that the expected share of drives failing at least once over
//! their observed window equals the configured target.
//!
//! SSD failures end in: an active failure day, an optional run of
//! zero-activity days, some unlogged days, then a swap row without
//! telemetry. HDD failures are a flagged snapshot after which the drive
//! disappears. Either may re-enter service after a repair delay.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ingest::{
    DailySummary, DriveId, ErrorKind, Family, FleetDataset, HddDailyRecord, HddDrives, Provenance, SmartValues,
    SsdDailyRecord, SsdDrives, SsdModel, SMART_IDS, US_PER_DAY,
};
use crate::lifecycle::detect_failures;
use crate::seed;

/// Upper end of the base daily hazard search.
const MAX_DAILY_HAZARD: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    /// Relative share of the fleet; shares are normalized.
    pub share: f64,
    /// Target share of this model's drives that fail at least once.
    pub failure_fraction: f64,
    /// Daily probability that a drive-day logs the error. Keys are SSD error
    /// kinds (`uncorrectable`, ...) or HDD counters (`smart_187`, ...).
    pub incidence: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BurstConfig {
    /// Length of the pre-failure window, failure day included.
    pub days: u32,
    /// Mean extra errors on the failure day; halves with each earlier day.
    pub mean: f64,
    /// Share of failures that show a burst at all.
    pub probability: f64,
    pub kinds: Vec<ErrorKind>,
    /// Kinds used instead of `kinds` when the drive fails during infancy.
    pub infant_kinds: Vec<ErrorKind>,
    /// Failure-day mean for `infant_kinds`.
    pub infant_mean: f64,
    /// HDD counters that take the burst.
    pub hdd_ids: Vec<u16>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InactivityConfig {
    /// Chance that a failure is followed by a logged zero-activity run.
    pub probability: f64,
    /// Run length is uniform on `1..=max_days`.
    pub max_days: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReentryConfig {
    pub probability: f64,
    /// Log-normal repair delay in days.
    pub median_days: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute tolerance on the fleet-wide failed share.
    pub failure_fraction: f64,
    /// Relative tolerance on daily error incidence.
    pub incidence: f64,
    /// Incidence checks with fewer expected events are inconclusive.
    pub min_expected_events: f64,
    /// A planted rate ratio passes when the realized ratio reaches this
    /// fraction of the configured multiplier.
    pub effect_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub family: Family,
    pub n_drives: usize,
    pub horizon_days: u32,
    /// Each drive is observed for a uniform share of the horizon at least this large.
    pub min_observed_fraction: f64,
    pub models: Vec<ModelConfig>,
    pub infant_days: u32,
    pub infant_hazard_multiplier: f64,
    /// Daily chance that an infant SSD, failing or not, logs errors of the
    /// adult pre-failure `burst.kinds`.
    pub infant_noise_probability: f64,
    /// Such a day logs `1 + Poisson(mean)` errors of each kind.
    pub infant_noise_mean: f64,
    pub hfh_threshold: f64,
    /// HDD hazard multiplier above `hfh_threshold` head-flying hours.
    pub hfh_effect: f64,
    pub burst: BurstConfig,
    /// Growth of the daily correctable-error count per 1,000 P/E cycles,
    /// relative to a fresh drive.
    pub wear_correctable_per_kcycle: f64,
    pub inactivity: InactivityConfig,
    /// Unlogged days between the last record and the swap, uniform on `0..=max`.
    pub max_missing_days: u32,
    pub reentry: ReentryConfig,
    /// Calendar origin of HDD snapshots.
    pub start_date: NaiveDate,
    pub seed: u64,
    pub tolerances: Tolerances,
}

fn incidence(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn ssd_model(name: &str, share: f64, failure_fraction: f64, rates: [f64; 9]) -> ModelConfig {
    let kinds = [
        "correctable",
        "final_read",
        "final_write",
        "meta",
        "read",
        "response",
        "timeout",
        "uncorrectable",
        "write",
    ];
    let mut inc: BTreeMap<String, f64> = kinds.iter().zip(rates).map(|(k, v)| (k.to_string(), v)).collect();
    inc.insert("erase".into(), 0.0001);
    ModelConfig {
        name: name.into(),
        share,
        failure_fraction,
        incidence: inc,
    }
}

fn hdd_model(name: &str, share: f64, failure_fraction: f64, rates: [f64; 5]) -> ModelConfig {
    ModelConfig {
        name: name.into(),
        share,
        failure_fraction,
        incidence: incidence(&[
            ("smart_187", rates[0]),
            ("smart_199", rates[1]),
            ("smart_5", rates[2]),
            ("smart_192", rates[3]),
            ("smart_198", rates[4]),
        ]),
    }
}

impl SynthConfig {
    /// Three MLC models with fleet-like failure shares and daily error incidence.
    pub fn ssd() -> Self {
        SynthConfig {
            family: Family::Ssd,
            n_drives: 2000,
            horizon_days: 730,
            min_observed_fraction: 0.5,
            models: vec![
                ssd_model(
                    "MLC-A",
                    0.31,
                    0.0695,
                    [0.828895, 0.001077, 0.000026, 0.000014, 0.000090, 0.000001, 0.000009, 0.002176, 0.000117],
                ),
                ssd_model(
                    "MLC-B",
                    0.32,
                    0.143,
                    [0.776308, 0.001805, 0.000027, 0.000016, 0.000103, 0.000004, 0.000010, 0.002349, 0.001309],
                ),
                ssd_model(
                    "MLC-D",
                    0.37,
                    0.125,
                    [0.767593, 0.001552, 0.000034, 0.000028, 0.000133, 0.000002, 0.000014, 0.002583, 0.000162],
                ),
            ],
            infant_days: 90,
            infant_hazard_multiplier: 3.0,
            infant_noise_probability: 0.0,
            infant_noise_mean: 3.0,
            hfh_threshold: 40_000.0,
            hfh_effect: 1.0,
            burst: BurstConfig {
                days: 3,
                mean: 6.0,
                probability: 0.9,
                kinds: vec![ErrorKind::Uncorrectable],
                infant_kinds: vec![ErrorKind::Uncorrectable],
                infant_mean: 6.0,
                hdd_ids: vec![187, 5],
            },
            wear_correctable_per_kcycle: 2.0,
            inactivity: InactivityConfig {
                probability: 0.36,
                max_days: 14,
            },
            max_missing_days: 10,
            reentry: ReentryConfig {
                probability: 0.5,
                median_days: 30.0,
                sigma: 1.5,
            },
            start_date: NaiveDate::from_ymd_opt(2015, 1, 1).expect("valid date"),
            seed: 0,
            tolerances: Tolerances {
                failure_fraction: 0.02,
                incidence: 0.2,
                min_expected_events: 50.0,
                effect_ratio: 0.6,
            },
        }
    }

    /// Five Seagate-like models; hazard rises above the HFH threshold.
    pub fn hdd() -> Self {
        SynthConfig {
            family: Family::Hdd,
            models: vec![
                hdd_model("ST12000NM0007", 0.37, 0.0376, [0.004301, 0.007232, 0.014590, 0.330956, 0.003755]),
                hdd_model("ST3000DM001", 0.04, 0.3189, [0.216522, 0.303442, 0.092016, 0.001818, 0.074695]),
                hdd_model("ST4000DM000", 0.35, 0.1021, [0.014837, 0.022238, 0.004435, 0.000549, 0.006698]),
                hdd_model("ST8000DM002", 0.10, 0.0347, [0.005044, 0.007391, 0.022137, 0.010971, 0.00377]),
                hdd_model("ST8000NM0055", 0.14, 0.0291, [0.004534, 0.007392, 0.020378, 0.020668, 0.003742]),
            ],
            infant_hazard_multiplier: 1.0,
            hfh_effect: 2.0,
            reentry: ReentryConfig {
                probability: 0.06,
                median_days: 30.0,
                sigma: 1.0,
            },
            ..Self::ssd()
        }
    }

    /// SSD fleet where infant drives, healthy or not, log sporadic errors of
    /// the adult failure signature. Only the correctable burst tells an infant
    /// failure apart, so a model fitted mostly on adults misranks young drives.
    pub fn ssd_infant_planted() -> Self {
        let mut cfg = Self::ssd();
        cfg.horizon_days = 1460;
        cfg.infant_noise_probability = 0.3;
        cfg.burst.infant_kinds = vec![ErrorKind::Correctable];
        cfg.burst.infant_mean = 100.0;
        cfg.burst.kinds = vec![
            ErrorKind::Uncorrectable,
            ErrorKind::Read,
            ErrorKind::Write,
            ErrorKind::FinalRead,
            ErrorKind::Meta,
            ErrorKind::Timeout,
        ];
        cfg
    }

    pub fn for_family(family: Family) -> Self {
        match family {
            Family::Ssd => Self::ssd(),
            Family::Hdd => Self::hdd(),
        }
    }

    /// Parse a JSON config; absent fields take the defaults of its `family`.
    pub fn from_json(s: &str) -> Result<Self> {
        let patch: Value = serde_json::from_str(s)?;
        let family = match patch.get("family") {
            Some(f) => serde_json::from_value(f.clone()).map_err(|e| Error::Config(format!("family: {e}")))?,
            None => Family::Ssd,
        };
        Self::patched(Self::for_family(family), patch)
    }

    /// Overlay a JSON object onto `base`, then validate.
    pub fn patched(base: Self, patch: Value) -> Result<Self> {
        if !patch.is_object() {
            return Err(Error::Config("synth config must be a JSON object".into()));
        }
        let mut merged = serde_json::to_value(base)?;
        merge(&mut merged, patch);
        let cfg: SynthConfig = serde_json::from_value(merged).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_drives == 0 {
            return bad("n_drives must be at least 1".into());
        }
        if self.models.is_empty() {
            return bad("no drive models".into());
        }
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        for m in &self.models {
            if !(m.share > 0.0 && m.share.is_finite()) {
                return bad(format!("model {}: share must be positive", m.name));
            }
            if !unit(m.failure_fraction) {
                return bad(format!("model {}: failure fraction outside [0, 1]", m.name));
            }
            for (k, &v) in &m.incidence {
                if !unit(v) {
                    return bad(format!("model {}: incidence of {k} outside [0, 1]", m.name));
                }
                match self.family {
                    Family::Ssd => {
                        k.parse::<ErrorKind>().map_err(|_| Error::Config(format!("unknown SSD error kind {k:?}")))?;
                    }
                    Family::Hdd => {
                        hdd_counter(k).ok_or_else(|| Error::Config(format!("unknown HDD counter {k:?}")))?;
                    }
                }
            }
            if self.family == Family::Ssd {
                m.name.parse::<SsdModel>().map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        for (name, v) in [
            ("infant_hazard_multiplier", self.infant_hazard_multiplier),
            ("hfh_effect", self.hfh_effect),
        ] {
            if !(v >= 1.0 && v.is_finite()) {
                return bad(format!("{name} must be at least 1"));
            }
        }
        for (name, v) in [
            ("min_observed_fraction", self.min_observed_fraction),
            ("infant_noise_probability", self.infant_noise_probability),
            ("burst.probability", self.burst.probability),
            ("inactivity.probability", self.inactivity.probability),
            ("reentry.probability", self.reentry.probability),
        ] {
            if !unit(v) {
                return bad(format!("{name} outside [0, 1]"));
            }
        }
        if !(self.burst.mean >= 0.0 && self.burst.infant_mean >= 0.0 && self.infant_noise_mean >= 0.0 && self.wear_correctable_per_kcycle >= 0.0) {
            return bad("burst means and wear slope must be non-negative".into());
        }
        if !(self.reentry.median_days > 0.0 && self.reentry.sigma >= 0.0) {
            return bad("reentry delay needs a positive median and non-negative sigma".into());
        }
        if self.inactivity.probability > 0.0 && self.inactivity.max_days == 0 {
            return bad("inactivity.max_days must be positive".into());
        }
        if let Some(id) = self.burst.hdd_ids.iter().find(|id| !SMART_IDS.contains(id)) {
            return bad(format!("burst counter smart_{id} is not tracked"));
        }
        if self.max_observed_days() < 1 {
            return bad("horizon too short for the failure tail".into());
        }
        Ok(())
    }

    fn tail_days(&self) -> u32 {
        match self.family {
            Family::Ssd => self.inactivity.max_days + self.max_missing_days + 1,
            Family::Hdd => 0,
        }
    }

    /// Longest failure-risk window; the SSD failure tail must fit after it.
    fn max_observed_days(&self) -> i64 {
        self.horizon_days as i64 - self.tail_days() as i64
    }
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self::ssd()
    }
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn hdd_counter(key: &str) -> Option<u16> {
    let id: u16 = key.strip_prefix("smart_")?.parse().ok()?;
    SMART_IDS.contains(&id).then_some(id)
}

/// A planted failure as the generator scheduled it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthFailure {
    pub drive: DriveId,
    /// Timeline day as the lifecycle module counts it.
    pub failure_day: i64,
    pub ordinal: u32,
    pub swap_day: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthFleet {
    pub dataset: FleetDataset,
    pub truth: Vec<TruthFailure>,
    /// Solved base daily hazard per model, in config order.
    pub hazards: Vec<f64>,
}

pub fn write_truth_csv<W: Write>(truth: &[TruthFailure], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["drive", "failure_day", "ordinal", "swap_day"])?;
    for t in truth {
        w.write_record([
            t.drive.to_string(),
            t.failure_day.to_string(),
            t.ordinal.to_string(),
            t.swap_day.map(|d| d.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-drive quantities fixed before hazards are solved.
struct DrivePlan {
    model: usize,
    observed_days: i64,
    /// HDD: calendar offset of the first snapshot.
    offset_days: i64,
    /// HDD: drive age at the first snapshot.
    initial_age_days: i64,
    /// HDD: head-flying hours per powered hour.
    flying_ratio: f64,
    workload: f64,
}

impl DrivePlan {
    fn hfh_at(&self, day: i64) -> f64 {
        (self.initial_age_days + day) as f64 * 24.0 * self.flying_ratio
    }

    fn age_at(&self, day: i64) -> i64 {
        self.initial_age_days + day
    }
}

fn hazard_multiplier(cfg: &SynthConfig, plan: &DrivePlan, day: i64) -> f64 {
    let mut m = 1.0;
    if plan.age_at(day) < cfg.infant_days as i64 {
        m *= cfg.infant_hazard_multiplier;
    }
    if cfg.family == Family::Hdd && plan.hfh_at(day) > cfg.hfh_threshold {
        m *= cfg.hfh_effect;
    }
    m
}

/// Days at each hazard multiplier over the drive's observed window.
fn exposure_profile(cfg: &SynthConfig, plan: &DrivePlan) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for d in 0..plan.observed_days {
        let m = hazard_multiplier(cfg, plan, d);
        match out.iter_mut().find(|(k, _)| *k == m) {
            Some(slot) => slot.1 += 1.0,
            None => out.push((m, 1.0)),
        }
    }
    out
}

fn expected_failed_share(h: f64, profiles: &[&Vec<(f64, f64)>]) -> f64 {
    let total: f64 = profiles
        .iter()
        .map(|p| {
            let log_s: f64 = p.iter().map(|&(m, n)| n * (1.0 - (h * m).min(1.0)).ln()).sum();
            1.0 - log_s.exp()
        })
        .sum();
    total / profiles.len() as f64
}

fn solve_hazard(target: f64, profiles: &[&Vec<(f64, f64)>], model: &str) -> Result<f64> {
    if target == 0.0 || profiles.is_empty() {
        return Ok(0.0);
    }
    // a daily hazard below one never makes failure certain
    if target >= 1.0 || expected_failed_share(MAX_DAILY_HAZARD, profiles) < target {
        return Err(Error::Config(format!(
            "model {model}: failure fraction {target} is unreachable within the observed windows"
        )));
    }
    let (mut lo, mut hi) = (0.0, MAX_DAILY_HAZARD);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if expected_failed_share(mid, profiles) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Model index per drive: largest-remainder counts, then a seeded shuffle.
fn allocate_models(cfg: &SynthConfig) -> Vec<usize> {
    let total: f64 = cfg.models.iter().map(|m| m.share).sum();
    let n = cfg.n_drives;
    let exact: Vec<f64> = cfg.models.iter().map(|m| m.share / total * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..exact.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let short = n - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    let mut out: Vec<usize> = counts.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c)).collect();
    out.shuffle(&mut seed::rng_for(cfg.seed, u64::MAX));
    out
}

fn plan_drives(cfg: &SynthConfig) -> Vec<DrivePlan> {
    let max_days = cfg.max_observed_days();
    let min_days = ((cfg.min_observed_fraction * max_days as f64).ceil() as i64).clamp(1, max_days);
    allocate_models(cfg)
        .into_iter()
        .enumerate()
        .map(|(i, model)| {
            let mut rng = seed::rng_for(cfg.seed, i as u64);
            let observed_days = rng.random_range(min_days..=max_days);
            let workload = LogNormal::new(0.0, 0.5).expect("valid").sample(&mut rng);
            let (offset_days, initial_age_days, flying_ratio) = match cfg.family {
                Family::Ssd => (0, 0, 1.0),
                Family::Hdd => (
                    rng.random_range(0..=cfg.horizon_days as i64 - observed_days),
                    rng.random_range(0..=1800),
                    rng.random_range(0.6..1.0),
                ),
            };
            DrivePlan {
                model,
                observed_days,
                offset_days,
                initial_age_days,
                flying_ratio,
                workload,
            }
        })
        .collect()
}

fn poisson(rng: &mut ChaCha8Rng, lambda: f64) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).expect("positive rate").sample(rng) as u64
}

/// Draw the first failure day in `start..end`, if any.
fn draw_failure(cfg: &SynthConfig, plan: &DrivePlan, h: f64, start: i64, end: i64, rng: &mut ChaCha8Rng) -> Option<i64> {
    if h == 0.0 {
        return None;
    }
    (start..end).find(|&d| rng.random::<f64>() < (h * hazard_multiplier(cfg, plan, d)).min(1.0))
}

fn repair_delay(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Option<i64> {
    if !rng.random_bool(cfg.reentry.probability) {
        return None;
    }
    let ln = LogNormal::new(cfg.reentry.median_days.ln(), cfg.reentry.sigma).expect("validated");
    Some((ln.sample(rng).round() as i64).max(1))
}

/// Pre-failure burst: the failure day's kinds and per-day means.
struct Burst<'a> {
    failure_day: i64,
    kinds: &'a [ErrorKind],
    mean: f64,
}

impl Burst<'_> {
    fn mean_on(&self, cfg: &SynthConfig, day: i64) -> f64 {
        let dist = self.failure_day - day;
        if dist < 0 || dist >= cfg.burst.days as i64 {
            0.0
        } else {
            self.mean * 0.5f64.powi(dist as i32)
        }
    }
}

struct SsdState {
    pe: f64,
    factory: u64,
    new_bad: u64,
}

fn ssd_active_day(cfg: &SynthConfig, plan: &DrivePlan, rates: &[(ErrorKind, f64)], st: &mut SsdState, day: i64, burst: Option<&Burst>, rng: &mut ChaCha8Rng) -> DailySummary {
    let w = plan.workload;
    let pe_step = w * 3.0 * rng.random_range(0.5..1.5);
    st.pe += pe_step;
    let mut s = DailySummary {
        read_ops: ((w * 50_000.0 * rng.random_range(0.5..1.5)).round() as u64).max(1),
        write_ops: ((w * 20_000.0 * rng.random_range(0.5..1.5)).round() as u64).max(1),
        erase_ops: (pe_step * 1000.0).round() as u64,
        pe_cycles_cum: st.pe.floor() as u64,
        bad_blocks_factory_cum: st.factory,
        ..Default::default()
    };
    let wear = 1.0 + cfg.wear_correctable_per_kcycle * st.pe / 1000.0;
    for &(kind, p) in rates {
        if rng.random::<f64>() < p.min(1.0) {
            let extra = if kind == ErrorKind::Correctable { 29.0 * wear } else { 0.5 };
            s.errors.add(kind, (1 + poisson(rng, extra)) as u32);
        }
    }
    if day < cfg.infant_days as i64 && rng.random::<f64>() < cfg.infant_noise_probability {
        for &k in &cfg.burst.kinds {
            s.errors.add(k, (1 + poisson(rng, cfg.infant_noise_mean)) as u32);
        }
    }
    if rng.random::<f64>() < 0.001 {
        st.new_bad += 1 + poisson(rng, 1.0);
    }
    if let Some(b) = burst {
        let mean = b.mean_on(cfg, day);
        if mean > 0.0 {
            for &k in b.kinds {
                s.errors.add(k, poisson(rng, mean) as u32);
            }
        }
    }
    s.bad_blocks_new_cum = st.new_bad;
    s
}

fn ssd_drive(cfg: &SynthConfig, idx: usize, plan: &DrivePlan, h: f64, truth: &mut Vec<TruthFailure>) -> (DriveId, Vec<SsdDailyRecord>) {
    let mut rng = seed::rng_for(seed::derive(cfg.seed, 1), idx as u64);
    let model_cfg = &cfg.models[plan.model];
    let model: SsdModel = model_cfg.name.parse().expect("validated");
    let id: DriveId = Arc::from(format!("ssd-{idx:05}").as_str());
    let rates: Vec<(ErrorKind, f64)> = model_cfg
        .incidence
        .iter()
        .map(|(k, &v)| (k.parse().expect("validated"), v))
        .collect();
    let mut st = SsdState {
        pe: 0.0,
        factory: poisson(&mut rng, 20.0),
        new_bad: 0,
    };
    let mut recs = Vec::new();
    let rec = |day: i64, summary: Option<DailySummary>, swap: bool| SsdDailyRecord {
        drive_id: id.clone(),
        model,
        timestamp_us: day as u64 * US_PER_DAY + 3_600_000_000,
        summary,
        swap_event: swap,
    };
    let end = plan.observed_days;
    let mut start = 0;
    let mut ordinal = 0;
    while start < end {
        let fail = draw_failure(cfg, plan, h, start, end, &mut rng);
        let bursting = fail.is_some() && rng.random_bool(cfg.burst.probability);
        let burst = fail.filter(|_| bursting).map(|f| {
            let (kinds, mean) = if f < cfg.infant_days as i64 {
                (&cfg.burst.infant_kinds, cfg.burst.infant_mean)
            } else {
                (&cfg.burst.kinds, cfg.burst.mean)
            };
            Burst {
                failure_day: f,
                kinds,
                mean,
            }
        });
        let last = fail.unwrap_or(end - 1);
        for day in start..=last {
            let s = ssd_active_day(cfg, plan, &rates, &mut st, day, burst.as_ref(), &mut rng);
            recs.push(rec(day, Some(s), false));
        }
        let Some(f) = fail else { break };
        let mut day = f;
        if rng.random_bool(cfg.inactivity.probability) {
            let run = rng.random_range(1..=cfg.inactivity.max_days) as i64;
            for _ in 0..run {
                day += 1;
                let s = DailySummary {
                    pe_cycles_cum: st.pe.floor() as u64,
                    bad_blocks_factory_cum: st.factory,
                    bad_blocks_new_cum: st.new_bad,
                    dead: true,
                    ..Default::default()
                };
                recs.push(rec(day, Some(s), false));
            }
        }
        let swap = day + rng.random_range(0..=cfg.max_missing_days) as i64 + 1;
        recs.push(rec(swap, None, true));
        ordinal += 1;
        truth.push(TruthFailure {
            drive: id.clone(),
            failure_day: f,
            ordinal,
            swap_day: Some(swap),
        });
        match repair_delay(cfg, &mut rng) {
            Some(delay) => start = swap + delay,
            None => break,
        }
    }
    (id, recs)
}

/// Nominal capacity from the digits of a Seagate-style model name (GB).
fn capacity_bytes(model: &str) -> Option<i64> {
    let digits: String = model.chars().skip_while(|c| !c.is_ascii_digit()).take_while(char::is_ascii_digit).collect();
    digits.parse::<i64>().ok().map(|gb| gb * 1_000_000_000)
}

fn hdd_drive(cfg: &SynthConfig, idx: usize, plan: &DrivePlan, h: f64, truth: &mut Vec<TruthFailure>) -> (DriveId, Vec<HddDailyRecord>) {
    let mut rng = seed::rng_for(seed::derive(cfg.seed, 1), idx as u64);
    let model_cfg = &cfg.models[plan.model];
    let model: Arc<str> = Arc::from(model_cfg.name.as_str());
    let capacity = capacity_bytes(&model_cfg.name);
    let id: DriveId = Arc::from(format!("Z{idx:07}").as_str());
    let rates: Vec<(u16, f64)> = model_cfg
        .incidence
        .iter()
        .map(|(k, &v)| (hdd_counter(k).expect("validated"), v))
        .collect();
    let mut counters: BTreeMap<u16, u64> = [1, 3, 4, 5, 7, 10, 12, 187, 188, 192, 193, 197, 198, 199, 241, 242]
        .into_iter()
        .map(|id| (id, 0))
        .collect();
    counters.insert(4, rng.random_range(1..50));
    counters.insert(12, rng.random_range(1..50));
    counters.insert(193, rng.random_range(0..10_000));
    let origin = cfg.start_date + Days::new(plan.offset_days as u64);
    let end = plan.observed_days;
    let mut recs = Vec::new();
    let mut start = 0;
    let mut ordinal = 0;
    while start < end {
        let fail = draw_failure(cfg, plan, h, start, end, &mut rng);
        let bursting = fail.is_some() && rng.random_bool(cfg.burst.probability);
        let last = fail.unwrap_or(end - 1);
        for day in start..=last {
            let c = &mut counters;
            *c.get_mut(&1).expect("seeded") = rng.random_range(0..200_000_000);
            *c.get_mut(&7).expect("seeded") += rng.random_range(0..100_000);
            *c.get_mut(&193).expect("seeded") += poisson(&mut rng, 5.0);
            *c.get_mut(&241).expect("seeded") += (plan.workload * 5e7 * rng.random_range(0.5..1.5)) as u64;
            *c.get_mut(&242).expect("seeded") += (plan.workload * 8e7 * rng.random_range(0.5..1.5)) as u64;
            if rng.random::<f64>() < 0.002 {
                *c.get_mut(&4).expect("seeded") += 1;
                *c.get_mut(&12).expect("seeded") += 1;
            }
            for &(sid, p) in &rates {
                if rng.random::<f64>() < p {
                    *c.entry(sid).or_default() += 1 + poisson(&mut rng, 0.5);
                }
            }
            if let (true, Some(f)) = (bursting, fail) {
                let dist = f - day;
                if dist >= 0 && dist < cfg.burst.days as i64 {
                    let mean = cfg.burst.mean * 0.5f64.powi(dist as i32);
                    for sid in &cfg.burst.hdd_ids {
                        *c.entry(*sid).or_default() += poisson(&mut rng, mean);
                    }
                }
            }
            let mut smart: SmartValues = c.iter().map(|(&k, &v)| (k, v)).collect();
            smart.insert(9, (plan.age_at(day) * 24) as u64 + rng.random_range(0..24));
            smart.insert(240, plan.hfh_at(day).floor() as u64);
            smart.insert(194, rng.random_range(22..42));
            smart.insert(190, rng.random_range(20..40));
            recs.push(HddDailyRecord {
                date: origin + Days::new(day as u64),
                serial: id.clone(),
                model: model.clone(),
                capacity_bytes: capacity,
                failed_today: fail == Some(day),
                smart_raw: smart,
            });
        }
        let Some(f) = fail else { break };
        ordinal += 1;
        truth.push(TruthFailure {
            drive: id.clone(),
            failure_day: f,
            ordinal,
            swap_day: None,
        });
        match repair_delay(cfg, &mut rng) {
            Some(delay) => start = f + delay,
            None => break,
        }
    }
    (id, recs)
}

/// Generate a fleet and the failures planted in it. Deterministic in `cfg.seed`.
pub fn generate_fleet(cfg: &SynthConfig) -> Result<SynthFleet> {
    cfg.validate()?;
    let plans = plan_drives(cfg);
    let profiles: Vec<Vec<(f64, f64)>> = plans.iter().map(|p| exposure_profile(cfg, p)).collect();
    let hazards = cfg
        .models
        .iter()
        .enumerate()
        .map(|(m, mc)| {
            let mine: Vec<&Vec<(f64, f64)>> = plans
                .iter()
                .zip(&profiles)
                .filter(|(p, _)| p.model == m)
                .map(|(_, prof)| prof)
                .collect();
            solve_hazard(mc.failure_fraction, &mine, &mc.name)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut truth = Vec::new();
    let mut prov = Provenance::new(format!("synthetic:{}:seed={}", cfg.family, cfg.seed));
    let dataset = match cfg.family {
        Family::Ssd => {
            let mut drives = SsdDrives::new();
            for (i, p) in plans.iter().enumerate() {
                let (id, recs) = ssd_drive(cfg, i, p, hazards[p.model], &mut truth);
                prov.data_rows += recs.len() as u64;
                drives.insert(id, recs);
            }
            FleetDataset::ssd(drives, prov)
        }
        Family::Hdd => {
            let mut drives = HddDrives::new();
            for (i, p) in plans.iter().enumerate() {
                let (id, recs) = hdd_drive(cfg, i, p, hazards[p.model], &mut truth);
                prov.data_rows += recs.len() as u64;
                drives.insert(id, recs);
            }
            FleetDataset::hdd(drives, prov)
        }
    };
    Ok(SynthFleet {
        dataset,
        truth,
        hazards,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCheck {
    pub name: String,
    pub target: f64,
    pub realized: f64,
    pub tolerance: f64,
    /// `None` when there is too little data to judge.
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub checks: Vec<CalibrationCheck>,
    /// No check failed (inconclusive checks do not count).
    pub passed: bool,
}

impl CalibrationReport {
    pub fn failed(&self) -> impl Iterator<Item = &CalibrationCheck> {
        self.checks.iter().filter(|c| c.passed == Some(false))
    }
}

fn ratio_check(name: &str, multiplier: f64, frac: f64, young: (f64, f64), old: (f64, f64)) -> CalibrationCheck {
    let (fy, ey) = young;
    let (fo, eo) = old;
    let realized = if fy > 0.0 && fo > 0.0 && ey > 0.0 && eo > 0.0 {
        (fy / ey) / (fo / eo)
    } else {
        f64::NAN
    };
    CalibrationCheck {
        name: name.into(),
        target: multiplier,
        realized,
        tolerance: multiplier * (1.0 - frac),
        passed: realized.is_finite().then(|| realized >= frac * multiplier),
    }
}

/// Recompute failed shares, error incidence and planted rate ratios from a
/// generated dataset and compare them with `cfg`.
pub fn verify_fleet(ds: &FleetDataset, truth: &[TruthFailure], cfg: &SynthConfig) -> CalibrationReport {
    let mut checks = Vec::new();
    let failures = detect_failures(ds).unwrap_or_default();
    let models = ds.drive_models();

    checks.push(CalibrationCheck {
        name: "planted failures detected".into(),
        target: truth.len() as f64,
        realized: failures.len() as f64,
        tolerance: 0.0,
        passed: Some(failures.len() == truth.len()),
    });

    // failed share per model and overall
    let failed: std::collections::BTreeSet<&DriveId> = failures.iter().map(|f| &f.drive).collect();
    let mut total_target = 0.0;
    let mut total_failed = 0usize;
    for mc in &cfg.models {
        let drives: Vec<&DriveId> = models.iter().filter(|(_, m)| **m == mc.name).map(|(d, _)| d).collect();
        if drives.is_empty() {
            continue;
        }
        let n = drives.len() as f64;
        let k = drives.iter().filter(|d| failed.contains(**d)).count();
        total_failed += k;
        total_target += mc.failure_fraction * n;
        let t = mc.failure_fraction;
        let tol = cfg.tolerances.failure_fraction.max(3.0 * (t * (1.0 - t) / n).sqrt());
        let realized = k as f64 / n;
        checks.push(CalibrationCheck {
            name: format!("failed share {}", mc.name),
            target: t,
            realized,
            tolerance: tol,
            passed: Some((realized - t).abs() <= tol),
        });
    }
    let n_all = models.len().max(1) as f64;
    let (t, realized) = (total_target / n_all, total_failed as f64 / n_all);
    checks.push(CalibrationCheck {
        name: "failed share all".into(),
        target: t,
        realized,
        tolerance: cfg.tolerances.failure_fraction,
        passed: Some((realized - t).abs() <= cfg.tolerances.failure_fraction),
    });

    let mut truth_by_drive: BTreeMap<&str, Vec<i64>> = BTreeMap::new();
    for t in truth {
        truth_by_drive.entry(&t.drive).or_default().push(t.failure_day);
    }
    let in_burst = |drive: &str, day: i64| {
        truth_by_drive
            .get(drive)
            .is_some_and(|fs| fs.iter().any(|&f| f >= day && f - day < cfg.burst.days as i64))
    };
    let infant = cfg.infant_days as i64;

    // baseline incidence: adult, active, outside pre-failure windows
    let mut days_by_model: BTreeMap<&str, f64> = BTreeMap::new();
    let mut hits: BTreeMap<(&str, String), f64> = BTreeMap::new();
    let (mut young, mut old) = ((0.0, 0.0), (0.0, 0.0));
    let (mut below, mut above) = ((0.0, 0.0), (0.0, 0.0));
    match ds.family() {
        Family::Ssd => {
            let drives = ds.ssd_drives().expect("family checked");
            for (id, recs) in drives {
                for r in recs {
                    let Some(s) = &r.summary else { continue };
                    if !s.is_active() {
                        continue;
                    }
                    let day = r.day();
                    if day < infant {
                        young.1 += 1.0;
                    } else {
                        old.1 += 1.0;
                    }
                    if day < infant || in_burst(id, day) {
                        continue;
                    }
                    let m = r.model.as_str();
                    *days_by_model.entry(m).or_default() += 1.0;
                    for k in ErrorKind::ALL {
                        if s.errors.get(k) > 0 {
                            *hits.entry((m, k.as_str().to_string())).or_default() += 1.0;
                        }
                    }
                }
            }
        }
        Family::Hdd => {
            let drives = ds.hdd_drives().expect("family checked");
            for (id, recs) in drives {
                let first_date = recs[0].date;
                for (i, r) in recs.iter().enumerate() {
                    let day = (r.date - first_date).num_days();
                    let age = r.smart_raw.get(9).map_or(day, |h| (h / 24) as i64);
                    let hfh = r.smart_raw.get(240).unwrap_or(0) as f64;
                    let side = if hfh > cfg.hfh_threshold { &mut above } else { &mut below };
                    side.1 += 1.0;
                    side.0 += r.failed_today as u8 as f64;
                    let age_side = if age < infant { &mut young } else { &mut old };
                    age_side.1 += 1.0;
                    if i == 0 || age < infant || in_burst(id, day) {
                        continue;
                    }
                    let prev = &recs[i - 1];
                    *days_by_model.entry(&r.model).or_default() += 1.0;
                    for (sid, v) in r.smart_raw.iter() {
                        if prev.smart_raw.get(sid).is_some_and(|p| v > p) {
                            *hits.entry((&r.model, format!("smart_{sid}"))).or_default() += 1.0;
                        }
                    }
                }
            }
        }
    }
    for f in &failures {
        if f.age_days < infant {
            young.0 += 1.0;
        } else {
            old.0 += 1.0;
        }
    }
    for mc in &cfg.models {
        let days = days_by_model.get(mc.name.as_str()).copied().unwrap_or(0.0);
        for (kind, &target) in &mc.incidence {
            if target <= 0.0 {
                continue;
            }
            let realized = if days > 0.0 {
                hits.get(&(mc.name.as_str(), kind.clone())).copied().unwrap_or(0.0) / days
            } else {
                f64::NAN
            };
            let enough = target * days >= cfg.tolerances.min_expected_events;
            checks.push(CalibrationCheck {
                name: format!("incidence {} {kind}", mc.name),
                target,
                realized,
                tolerance: cfg.tolerances.incidence,
                passed: enough.then(|| ((realized - target) / target).abs() <= cfg.tolerances.incidence),
            });
        }
    }
    if cfg.infant_hazard_multiplier > 1.0 {
        checks.push(ratio_check(
            "infant failure-rate ratio",
            cfg.infant_hazard_multiplier,
            cfg.tolerances.effect_ratio,
            young,
            old,
        ));
    }
    if cfg.family == Family::Hdd && cfg.hfh_effect > 1.0 {
        checks.push(ratio_check(
            "large-HFH failure-rate ratio",
            cfg.hfh_effect,
            cfg.tolerances.effect_ratio,
            above,
            below,
        ));
    }
    let passed = checks.iter().all(|c| c.passed != Some(false));
    CalibrationReport { checks, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_canonical, write_canonical};

    fn small(family: Family) -> SynthConfig {
        SynthConfig {
            n_drives: 60,
            horizon_days: 200,
            seed: 5,
            ..SynthConfig::for_family(family)
        }
    }

    #[test]
    fn zero_fraction_means_no_failures() {
        let mut cfg = small(Family::Ssd);
        for m in &mut cfg.models {
            m.failure_fraction = 0.0;
        }
        let fleet = generate_fleet(&cfg).unwrap();
        assert!(fleet.truth.is_empty());
        let swaps = fleet.dataset.ssd_drives().unwrap().values().flatten().filter(|r| r.swap_event).count();
        assert_eq!(swaps, 0);
    }

    #[test]
    fn unreachable_fraction_is_config_error() {
        let mut cfg = small(Family::Ssd);
        cfg.models[0].failure_fraction = 1.0;
        assert!(matches!(generate_fleet(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn same_seed_same_bytes_and_ingest_accepts() {
        for family in [Family::Ssd, Family::Hdd] {
            let cfg = small(family);
            let a = generate_fleet(&cfg).unwrap();
            let b = generate_fleet(&cfg).unwrap();
            let (mut wa, mut wb) = (Vec::new(), Vec::new());
            write_canonical(&a.dataset, &mut wa).unwrap();
            write_canonical(&b.dataset, &mut wb).unwrap();
            assert_eq!(wa, wb);
            let back = parse_canonical(family, wa.as_slice(), "mem").unwrap();
            assert!(back.provenance.quarantined.is_empty());
            assert!(back.provenance.rejected.is_empty());
            assert_eq!(back, a.dataset);
        }
    }

    #[test]
    fn config_json_overrides_defaults() {
        let cfg = SynthConfig::from_json(r#"{"family":"hdd","n_drives":10,"burst":{"days":5}}"#).unwrap();
        assert_eq!(cfg.n_drives, 10);
        assert_eq!(cfg.burst.days, 5);
        assert_eq!(cfg.burst.mean, SynthConfig::hdd().burst.mean);
        assert_eq!(cfg.models, SynthConfig::hdd().models);
        assert!(SynthConfig::from_json(r#"{"n_drivez":10}"#).is_err());
        assert!(SynthConfig::from_json(r#"{"infant_hazard_multiplier":0.5}"#).is_err());
    }

    #[test]
    fn hazard_solver_hits_target_in_expectation() {
        let prof = vec![(1.0, 100.0)];
        let h = solve_hazard(0.2, &[&prof], "x").unwrap();
        assert!((1.0 - (1.0 - h).powi(100) - 0.2).abs() < 1e-12);
    }
}
