//! Browser demo: generate a small synthetic fleet and analyse it client-side.
//!
//! Each export takes and returns JSON strings. The `*_json` functions hold the
//! logic and run natively in tests; the `#[wasm_bindgen]` wrappers only turn
//! errors into JS exceptions.
//!
//! Build with `wasm-pack build crates/web --target web --out-dir www/pkg` and
//! serve `crates/web/www/`.

use std::collections::BTreeSet;

use drivelife::charstats::monthly_failure_rate;
use drivelife::eval::{auroc, cross_validated_eval, roc_curve, EvalConfig};
use drivelife::featurize::{label_lookahead, make_features};
use drivelife::learners::{ForestParams, ModelSpec};
use drivelife::lifecycle::{censored_cdf, reconstruct, time_to_failure_sample};
use drivelife::synthgen::{generate_fleet, SynthConfig};
use drivelife::{Family, FleetDataset};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Keeps a page responsive on one thread.
pub const MAX_DRIVES: usize = 1000;
pub const MAX_HORIZON_DAYS: u32 = 1095;

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct FleetRequest {
    pub family: Family,
    pub n_drives: usize,
    pub horizon_days: u32,
    pub seed: u64,
}

impl Default for FleetRequest {
    fn default() -> Self {
        FleetRequest {
            family: Family::Ssd,
            n_drives: 300,
            horizon_days: 365,
            seed: 1,
        }
    }
}

impl FleetRequest {
    fn generate(&self) -> Result<FleetDataset, String> {
        if self.n_drives == 0 || self.n_drives > MAX_DRIVES {
            return Err(format!("n_drives must be in 1..={MAX_DRIVES}"));
        }
        if self.horizon_days < 30 || self.horizon_days > MAX_HORIZON_DAYS {
            return Err(format!("horizon_days must be in 30..={MAX_HORIZON_DAYS}"));
        }
        let mut cfg = SynthConfig::for_family(self.family);
        cfg.n_drives = self.n_drives;
        cfg.horizon_days = self.horizon_days;
        cfg.seed = self.seed;
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(generate_fleet(&cfg).map_err(|e| e.to_string())?.dataset)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T, String> {
    serde_json::from_str(s).map_err(|e| format!("bad request: {e}"))
}

fn render<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct LifecycleView {
    drives: usize,
    failures: usize,
    failed_drives: usize,
    /// `[day, F(day)]`
    ttf_cdf: Vec<(f64, f64)>,
    censored_mass: f64,
    /// `[month, rate]`; null where no drive was exposed.
    monthly_rate: Vec<(f64, Option<f64>)>,
}

/// Time-to-failure CDF and monthly failure rate of a fresh fleet.
pub fn lifecycle_json(request: &str) -> Result<String, String> {
    let req: FleetRequest = parse(request)?;
    let ds = req.generate()?;
    let lc = reconstruct(&ds).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..=req.horizon_days).step_by(5).map(f64::from).collect();
    let cdf = censored_cdf(&time_to_failure_sample(&lc.periods), &grid).map_err(|e| e.to_string())?;
    let rate = monthly_failure_rate(&lc.failures, &ds);
    render(&LifecycleView {
        drives: ds.drive_count(),
        failures: lc.failures.len(),
        failed_drives: lc.failures.iter().map(|f| &f.drive).collect::<BTreeSet<_>>().len(),
        ttf_cdf: cdf.points,
        censored_mass: cdf.censored_mass,
        monthly_rate: rate.bins.iter().map(|b| (b.lo / 30.0, b.rate)).collect(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(default)]
struct EvalRequest {
    #[serde(flatten)]
    fleet: FleetRequest,
    model: String,
    lookahead: u32,
    folds: usize,
}

impl Default for EvalRequest {
    fn default() -> Self {
        EvalRequest {
            fleet: FleetRequest::default(),
            model: "rf".into(),
            lookahead: 0,
            folds: 5,
        }
    }
}

#[derive(Serialize)]
struct EvalView {
    examples: usize,
    positives: usize,
    mean: Option<f64>,
    stdev: Option<f64>,
    per_fold: Vec<f64>,
    /// `[fpr, tpr]`
    roc: Vec<(f64, f64)>,
}

/// Drive-grouped cross-validated AUROC and pooled ROC at one lookahead.
pub fn evaluate_json(request: &str) -> Result<String, String> {
    let req: EvalRequest = parse(request)?;
    let model = match ModelSpec::from_name(&req.model).map_err(|e| e.to_string())? {
        // fewer trees than the default; this runs in a browser tab
        ModelSpec::RandomForest(p) => ModelSpec::RandomForest(ForestParams { n_trees: 30, ..p }),
        other => other,
    };
    let ds = req.fleet.generate()?;
    let failures = reconstruct(&ds).map_err(|e| e.to_string())?.failures;
    let rows = make_features(&ds).map_err(|e| e.to_string())?;
    let ex = label_lookahead(&rows, &failures, req.lookahead);
    let cfg = EvalConfig {
        model,
        folds: req.folds,
        seed: req.fleet.seed,
        ..EvalConfig::default()
    };
    let report = cross_validated_eval(&ex, &cfg).map_err(|e| e.to_string())?;
    render(&EvalView {
        examples: ex.len(),
        positives: ex.positives(),
        mean: report.mean,
        stdev: report.stdev,
        per_fold: report.per_fold_auroc,
        roc: report.roc.iter().map(|&(_, f, t)| (f, t)).collect(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoredRequest {
    scores: Vec<f64>,
    labels: Vec<bool>,
}

#[derive(Serialize)]
struct ScoredView {
    auroc: f64,
    roc: Vec<(f64, f64)>,
}

/// AUROC and ROC of user-supplied scores.
pub fn auroc_json(request: &str) -> Result<String, String> {
    let req: ScoredRequest = parse(request)?;
    let a = auroc(&req.scores, &req.labels).map_err(|e| e.to_string())?;
    let roc = roc_curve(&req.scores, &req.labels).map_err(|e| e.to_string())?;
    render(&ScoredView {
        auroc: a,
        roc: roc.points.iter().map(|p| (p.fpr, p.tpr)).collect(),
    })
}

#[wasm_bindgen]
pub fn lifecycle(request: &str) -> Result<String, JsValue> {
    lifecycle_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn evaluate(request: &str) -> Result<String, JsValue> {
    evaluate_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn score(request: &str) -> Result<String, JsValue> {
    auroc_json(request).map_err(|e| JsValue::from_str(&e))
}
