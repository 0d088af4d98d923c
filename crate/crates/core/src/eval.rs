//! Evaluation protocol: drive-grouped k-fold cross-validation with majority
//! undersampling of training folds, ROC/AUROC, threshold confusion counts,
//! lookahead sweeps, cross-model matrices and partitioned training.
//!
//! One fold assignment is drawn per run from the seed and the fleet's drive
//! list, and every experiment in that run (each side of a partition, each
//! lookahead, each cell of a cross-model matrix) reuses it.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurize::{partition_indices, ExampleSet, PartitionRule};
use crate::ingest::DriveId;
use crate::learners::{Classifier, Matrix, ModelSpec};
use crate::seed;
use crate::stats;

/// Drive → fold index in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub folds: BTreeMap<DriveId, usize>,
}

impl FoldAssignment {
    pub fn fold_of(&self, drive: &str) -> Option<usize> {
        self.folds.get(drive).copied()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in self.folds.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Shuffle the distinct drive ids with the seed and deal them round-robin.
pub fn kfold_by_drive(ids: &[DriveId], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::Argument(format!("need at least 2 folds, got {k}")));
    }
    let distinct: BTreeSet<&DriveId> = ids.iter().collect();
    if distinct.len() < k {
        return Err(Error::Argument(format!("{} drives cannot fill {k} folds", distinct.len())));
    }
    let mut order: Vec<&DriveId> = distinct.into_iter().collect();
    order.shuffle(&mut seed::rng(seed));
    let folds = order.into_iter().enumerate().map(|(i, d)| (d.clone(), i % k)).collect();
    Ok(FoldAssignment { k, folds })
}

/// The fold assignment every evaluation over `examples` uses for `seed`.
///
/// Folds are drawn over the fleet's full drive list, so subsets of one
/// example set (partition sides, other lookaheads) share them.
pub fn fold_plan(examples: &ExampleSet, k: usize, seed: u64) -> Result<FoldAssignment> {
    let ids: Vec<DriveId> = examples.drives.iter().map(|d| d.id.clone()).collect();
    kfold_by_drive(&ids, k, seed::derive(seed, 0xF01D))
}

/// Indices kept after shrinking the majority class to `minority * ratio`
/// examples; every minority example survives. Output is in input order.
pub fn undersample(labels: &[bool], ratio: f64, seed: u64) -> Result<Vec<usize>> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::Argument(format!("undersampling ratio must be positive, got {ratio}")));
    }
    let (pos, neg): (Vec<usize>, Vec<usize>) = (0..labels.len()).partition(|&i| labels[i]);
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Empty("one class has no examples".into()));
    }
    let (minority, majority) = if pos.len() <= neg.len() { (pos, neg) } else { (neg, pos) };
    let target = ((minority.len() as f64 * ratio).round() as usize).max(1);
    let mut keep = minority;
    if majority.len() <= target {
        keep.extend(majority);
    } else {
        let mut rng = seed::rng(seed);
        keep.extend(index::sample(&mut rng, majority.len(), target).into_iter().map(|j| majority[j]));
    }
    keep.sort_unstable();
    Ok(keep)
}

/// One point of a ROC curve: scores `>= threshold` are predicted positive.
/// The origin has no threshold (nothing predicted positive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: Option<f64>,
    pub tp: u64,
    pub fp: u64,
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub positives: u64,
    pub negatives: u64,
    pub points: Vec<RocPoint>,
}

fn check_scored(scores: &[f64], labels: &[bool]) -> Result<(u64, u64)> {
    if scores.len() != labels.len() {
        return Err(Error::Argument(format!("{} scores but {} labels", scores.len(), labels.len())));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("scores".into()));
    }
    let p = labels.iter().filter(|&&l| l).count() as u64;
    let n = labels.len() as u64 - p;
    if p == 0 || n == 0 {
        return Err(Error::Undefined("ROC needs both classes".into()));
    }
    Ok((p, n))
}

/// Descending-score groups of tied scores as `(score, tp, fp)`.
fn tie_groups(scores: &[f64], labels: &[bool]) -> Vec<(f64, u64, u64)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut groups: Vec<(f64, u64, u64)> = Vec::new();
    for i in order {
        let (tp, fp) = (labels[i] as u64, !labels[i] as u64);
        match groups.last_mut() {
            Some(g) if g.0 == scores[i] => {
                g.1 += tp;
                g.2 += fp;
            }
            _ => groups.push((scores[i], tp, fp)),
        }
    }
    groups
}

pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    let (p, n) = check_scored(scores, labels)?;
    let mut points = vec![RocPoint {
        threshold: None,
        tp: 0,
        fp: 0,
        tpr: 0.0,
        fpr: 0.0,
    }];
    let (mut tp, mut fp) = (0, 0);
    for (s, gtp, gfp) in tie_groups(scores, labels) {
        tp += gtp;
        fp += gfp;
        points.push(RocPoint {
            threshold: Some(s),
            tp,
            fp,
            tpr: tp as f64 / p as f64,
            fpr: fp as f64 / n as f64,
        });
    }
    Ok(RocCurve {
        positives: p,
        negatives: n,
        points,
    })
}

/// Trapezoidal area under the ROC curve, computed on integer counts so it
/// equals the pairwise concordance probability (ties count one half) exactly.
pub fn auroc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (p, n) = check_scored(scores, labels)?;
    let mut twice_area: u128 = 0;
    let mut tp_before: u128 = 0;
    for (_, gtp, gfp) in tie_groups(scores, labels) {
        twice_area += (2 * tp_before + gtp as u128) * gfp as u128;
        tp_before += gtp as u128;
    }
    Ok(twice_area as f64 / (2 * p as u128 * n as u128) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Confusion {
    pub alpha: f64,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    /// Absent when there are no positives.
    pub tpr: Option<f64>,
    /// Absent when there are no negatives.
    pub fpr: Option<f64>,
}

/// Scores strictly greater than `alpha` are predicted failures.
pub fn confusion_at_threshold(scores: &[f64], labels: &[bool], alpha: f64) -> Confusion {
    let mut c = Confusion {
        alpha,
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
        tpr: None,
        fpr: None,
    };
    for (&s, &l) in scores.iter().zip(labels) {
        match (s > alpha, l) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    if c.tp + c.fn_ > 0 {
        c.tpr = Some(c.tp as f64 / (c.tp + c.fn_) as f64);
    }
    if c.fp + c.tn > 0 {
        c.fpr = Some(c.fp as f64 / (c.fp + c.tn) as f64);
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub model: ModelSpec,
    pub folds: usize,
    pub seed: u64,
    /// Majority examples kept per minority example in training folds.
    pub undersample_ratio: f64,
    /// Threshold for the reported confusion counts.
    pub alpha: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            model: ModelSpec::random_forest(),
            folds: 5,
            seed: 0,
            undersample_ratio: 1.0,
            alpha: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub fold: usize,
    /// Training examples after undersampling.
    pub train_examples: usize,
    pub train_positives: usize,
    pub test_examples: usize,
    pub test_positives: usize,
    pub auroc: Option<f64>,
    /// Why the fold contributes no AUROC.
    pub skipped: Option<String>,
}

/// What an evaluation was run with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub model: ModelSpec,
    pub folds: usize,
    pub seed: u64,
    pub undersample_ratio: f64,
    pub lookahead: Option<u32>,
    pub partition: Option<String>,
    /// `below`, `above` or absent for the whole set.
    pub side: Option<String>,
    pub fold_assignment: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: ConfigEcho,
    pub per_fold: Vec<FoldOutcome>,
    /// AUROC of the folds that were not skipped, in fold order.
    pub per_fold_auroc: Vec<f64>,
    pub mean: Option<f64>,
    /// Sample standard deviation (n - 1) across folds.
    pub stdev: Option<f64>,
    pub skipped_folds: usize,
    /// Pooled out-of-fold ROC as `[alpha, fpr, tpr]`; the origin has no alpha.
    pub roc: Vec<(Option<f64>, f64, f64)>,
    pub confusion: Option<Confusion>,
}

/// An evaluation plus the out-of-fold score of every example it tested.
#[derive(Debug, Clone, PartialEq)]
pub struct CvRun {
    pub report: EvalReport,
    pub scores: Vec<Option<f64>>,
}

fn matrix_of(ex: &ExampleSet, rows: &[usize]) -> Matrix {
    let p = ex.n_features();
    let mut v = Vec::with_capacity(rows.len() * p);
    for &i in rows {
        v.extend_from_slice(ex.row(i));
    }
    Matrix::new(rows.len(), p, v).expect("row-major buffer matches shape")
}

fn row_folds(ex: &ExampleSet, plan: &FoldAssignment) -> Result<Vec<usize>> {
    (0..ex.len())
        .map(|i| {
            plan.fold_of(ex.drive_id(i))
                .ok_or_else(|| Error::Argument(format!("drive {} has no fold", ex.drive_id(i))))
        })
        .collect()
}

struct FoldRun {
    outcomes: Vec<FoldOutcome>,
    /// Out-of-fold scores indexed like the example set.
    scores: Vec<Option<f64>>,
}

/// Train on `train_rows` outside each fold, score `test_rows` inside it.
fn run_folds(ex: &ExampleSet, fold_of: &[usize], train_rows: &[usize], test_rows: &[usize], cfg: &EvalConfig) -> Result<FoldRun> {
    let mut outcomes = Vec::with_capacity(cfg.folds);
    let mut scores = vec![None; ex.len()];
    for f in 0..cfg.folds {
        let fold_seed = seed::derive(cfg.seed, f as u64);
        let pool: Vec<usize> = train_rows.iter().copied().filter(|&i| fold_of[i] != f).collect();
        let test: Vec<usize> = test_rows.iter().copied().filter(|&i| fold_of[i] == f).collect();
        let test_positives = test.iter().filter(|&&i| ex.labels[i]).count();
        let mut out = FoldOutcome {
            fold: f,
            train_examples: 0,
            train_positives: 0,
            test_examples: test.len(),
            test_positives,
            auroc: None,
            skipped: None,
        };
        let pool_labels: Vec<bool> = pool.iter().map(|&i| ex.labels[i]).collect();
        let kept = match undersample(&pool_labels, cfg.undersample_ratio, seed::derive(fold_seed, 0)) {
            Ok(k) => k,
            Err(_) => {
                out.skipped = Some("training folds lack one class".into());
                outcomes.push(out);
                continue;
            }
        };
        let train: Vec<usize> = kept.iter().map(|&j| pool[j]).collect();
        let y: Vec<bool> = train.iter().map(|&i| ex.labels[i]).collect();
        out.train_examples = train.len();
        out.train_positives = y.iter().filter(|&&l| l).count();
        if test.is_empty() {
            out.skipped = Some("test fold is empty".into());
            outcomes.push(out);
            continue;
        }
        let model = cfg.model.fit(&matrix_of(ex, &train), &y, &ex.names, seed::derive(fold_seed, 1))?;
        let fold_scores: Vec<f64> = test.iter().map(|&i| model.predict_proba_unchecked(ex.row(i))).collect();
        for (&i, &s) in test.iter().zip(&fold_scores) {
            scores[i] = Some(s);
        }
        if test_positives == 0 || test_positives == test.len() {
            out.skipped = Some("test fold lacks one class".into());
        } else {
            let labels: Vec<bool> = test.iter().map(|&i| ex.labels[i]).collect();
            out.auroc = Some(auroc(&fold_scores, &labels)?);
        }
        outcomes.push(out);
    }
    Ok(FoldRun { outcomes, scores })
}

fn assemble(ex: &ExampleSet, run: &FoldRun, rows: &[usize], cfg: &EvalConfig, partition: Option<String>, side: Option<&str>) -> EvalReport {
    let per_fold_auroc: Vec<f64> = run.outcomes.iter().filter_map(|o| o.auroc).collect();
    let (mut scored, mut labels) = (Vec::new(), Vec::new());
    for &i in rows {
        if let Some(s) = run.scores[i] {
            scored.push(s);
            labels.push(ex.labels[i]);
        }
    }
    let roc = roc_curve(&scored, &labels)
        .map(|c| c.points.iter().map(|p| (p.threshold, p.fpr, p.tpr)).collect())
        .unwrap_or_default();
    let confusion = (!scored.is_empty()).then(|| confusion_at_threshold(&scored, &labels, cfg.alpha));
    EvalReport {
        config: ConfigEcho {
            model: cfg.model.clone(),
            folds: cfg.folds,
            seed: cfg.seed,
            undersample_ratio: cfg.undersample_ratio,
            lookahead: ex.lookahead,
            partition,
            side: side.map(String::from),
            fold_assignment: "one seeded assignment over all drives, shared by every evaluation in the run".into(),
        },
        mean: stats::mean(&per_fold_auroc),
        stdev: stats::sample_stdev(&per_fold_auroc),
        skipped_folds: run.outcomes.iter().filter(|o| o.skipped.is_some()).count(),
        per_fold: run.outcomes.clone(),
        per_fold_auroc,
        roc,
        confusion,
    }
}

/// Grouped k-fold evaluation returning out-of-fold scores as well.
pub fn cross_validate(examples: &ExampleSet, cfg: &EvalConfig) -> Result<CvRun> {
    if examples.is_empty() {
        return Err(Error::Empty("example set".into()));
    }
    let plan = fold_plan(examples, cfg.folds, cfg.seed)?;
    let fold_of = row_folds(examples, &plan)?;
    let rows: Vec<usize> = (0..examples.len()).collect();
    let run = run_folds(examples, &fold_of, &rows, &rows, cfg)?;
    let report = assemble(examples, &run, &rows, cfg, None, None);
    Ok(CvRun { report, scores: run.scores })
}

/// Train on each fold's complement (undersampled), test on the untouched fold.
/// Folds whose test set lacks a class are reported as skipped.
pub fn cross_validated_eval(examples: &ExampleSet, cfg: &EvalConfig) -> Result<EvalReport> {
    Ok(cross_validate(examples, cfg)?.report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lookahead: u32,
    pub report: EvalReport,
}

/// One evaluation per lookahead, all with the same folds and seeds.
pub fn lookahead_sweep<F>(mut build: F, lookaheads: &[u32], cfg: &EvalConfig) -> Result<Vec<SweepPoint>>
where
    F: FnMut(u32) -> Result<ExampleSet>,
{
    if lookaheads.is_empty() {
        return Err(Error::Argument("empty lookahead list".into()));
    }
    if lookaheads.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("lookaheads must be strictly ascending".into()));
    }
    lookaheads
        .iter()
        .map(|&n| {
            let ex = build(n)?;
            Ok(SweepPoint {
                lookahead: n,
                report: cross_validated_eval(&ex, cfg)?,
            })
        })
        .collect()
}

/// Train-model × test-model AUROC table with an extra row trained on all models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMatrix {
    pub train_models: Vec<String>,
    pub test_models: Vec<String>,
    /// `cells[i][j]`: mean per-fold AUROC; absent when no fold is scorable.
    pub cells: Vec<Vec<Option<f64>>>,
    pub stdev: Vec<Vec<Option<f64>>>,
}

pub const ALL_MODELS: &str = "All";

pub fn cross_model_matrix(examples: &ExampleSet, cfg: &EvalConfig) -> Result<ModelMatrix> {
    let mut by_model: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for i in 0..examples.len() {
        by_model.entry(examples.drive_model(i)).or_default().push(i);
    }
    if by_model.len() < 2 {
        return Err(Error::Argument(format!("need at least 2 drive models, found {}", by_model.len())));
    }
    let plan = fold_plan(examples, cfg.folds, cfg.seed)?;
    let fold_of = row_folds(examples, &plan)?;
    let all: Vec<usize> = (0..examples.len()).collect();
    let mut trains: Vec<(String, &[usize])> = by_model.iter().map(|(m, r)| (m.to_string(), r.as_slice())).collect();
    trains.push((ALL_MODELS.to_string(), &all));
    let test_models: Vec<String> = by_model.keys().map(|m| m.to_string()).collect();
    let mut cells = Vec::new();
    let mut stdev = Vec::new();
    for (_, train_rows) in &trains {
        let mut row = Vec::new();
        let mut row_sd = Vec::new();
        for test_rows in by_model.values() {
            let run = run_folds(examples, &fold_of, train_rows, test_rows, cfg)?;
            let aurocs: Vec<f64> = run.outcomes.iter().filter_map(|o| o.auroc).collect();
            row.push(stats::mean(&aurocs));
            row_sd.push(stats::sample_stdev(&aurocs));
        }
        cells.push(row);
        stdev.push(row_sd);
    }
    Ok(ModelMatrix {
        train_models: trains.into_iter().map(|(m, _)| m).collect(),
        test_models,
        cells,
        stdev,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub rule: String,
    pub below_examples: usize,
    pub above_examples: usize,
    /// Absent when the side lacks a class.
    pub below: Option<EvalReport>,
    pub above: Option<EvalReport>,
    pub unsplit: EvalReport,
    /// Mean per-fold AUROC of the unsplit models on each side's test examples.
    pub unsplit_on_below: Option<f64>,
    pub unsplit_on_above: Option<f64>,
}

fn has_both(ex: &ExampleSet, rows: &[usize]) -> bool {
    let p = rows.iter().filter(|&&i| ex.labels[i]).count();
    p > 0 && p < rows.len()
}

fn side_auroc(ex: &ExampleSet, fold_of: &[usize], scores: &[Option<f64>], rows: &[usize], k: usize) -> Result<Option<f64>> {
    let mut aurocs = Vec::new();
    for f in 0..k {
        let (mut s, mut l) = (Vec::new(), Vec::new());
        for &i in rows.iter().filter(|&&i| fold_of[i] == f) {
            if let Some(v) = scores[i] {
                s.push(v);
                l.push(ex.labels[i]);
            }
        }
        if l.iter().any(|&x| x) && l.iter().any(|&x| !x) {
            aurocs.push(auroc(&s, &l)?);
        }
    }
    Ok(stats::mean(&aurocs))
}

/// Evaluate each side of the partition on its own and the unsplit set as a
/// baseline, all under the same folds.
pub fn partitioned_eval(examples: &ExampleSet, rule: &PartitionRule, cfg: &EvalConfig) -> Result<PartitionReport> {
    let (below, above) = partition_indices(examples, rule)?;
    let plan = fold_plan(examples, cfg.folds, cfg.seed)?;
    let fold_of = row_folds(examples, &plan)?;
    let all: Vec<usize> = (0..examples.len()).collect();
    let rule_s = rule.to_string();
    let side = |rows: &[usize], name: &str| -> Result<Option<EvalReport>> {
        if !has_both(examples, rows) {
            return Ok(None);
        }
        let run = run_folds(examples, &fold_of, rows, rows, cfg)?;
        Ok(Some(assemble(examples, &run, rows, cfg, Some(rule_s.clone()), Some(name))))
    };
    let below_report = side(&below, "below")?;
    let above_report = side(&above, "above")?;
    let run = run_folds(examples, &fold_of, &all, &all, cfg)?;
    let unsplit = assemble(examples, &run, &all, cfg, Some(rule_s.clone()), None);
    Ok(PartitionReport {
        rule: rule_s,
        below_examples: below.len(),
        above_examples: above.len(),
        unsplit_on_below: side_auroc(examples, &fold_of, &run.scores, &below, cfg.folds)?,
        unsplit_on_above: side_auroc(examples, &fold_of, &run.scores, &above, cfg.folds)?,
        below: below_report,
        above: above_report,
        unsplit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TprBin {
    pub lo: f64,
    /// `None` for the open-ended last bin.
    pub hi: Option<f64>,
    pub positives: usize,
    /// One entry per alpha; absent when the bin has no test positives.
    pub tpr: Vec<Option<f64>>,
}

/// Cross-validated TPR of positives binned by partition key. `edges` are
/// ascending bin starts; the last bin is open-ended and keys below the first
/// edge are ignored.
pub fn tpr_vs_attribute(examples: &ExampleSet, cfg: &EvalConfig, alphas: &[f64], edges: &[f64]) -> Result<Vec<TprBin>> {
    if let Some(a) = alphas.iter().find(|a| !(0.5..=1.0).contains(*a)) {
        return Err(Error::Argument(format!("alpha {a} outside [0.5, 1]")));
    }
    if edges.is_empty() || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Argument("bin edges must be non-empty and strictly ascending".into()));
    }
    let run = cross_validate(examples, cfg)?;
    let mut bins: Vec<(usize, Vec<usize>)> = edges.iter().map(|_| (0, vec![0; alphas.len()])).collect();
    for i in 0..examples.len() {
        let (true, Some(score)) = (examples.labels[i], run.scores[i]) else {
            continue;
        };
        let key = examples.partition_key[i];
        let Some(b) = edges.iter().rposition(|&e| key >= e) else {
            continue;
        };
        bins[b].0 += 1;
        for (hits, &a) in bins[b].1.iter_mut().zip(alphas) {
            *hits += (score > a) as usize;
        }
    }
    Ok(bins
        .into_iter()
        .enumerate()
        .map(|(b, (positives, hits))| TprBin {
            lo: edges[b],
            hi: edges.get(b + 1).copied(),
            positives,
            tpr: hits
                .into_iter()
                .map(|h| (positives > 0).then(|| h as f64 / positives as f64))
                .collect(),
        })
        .collect())
}
