//! featurize, train, evaluate, sweep, matrix and partition-eval.

use drivelife::eval::{cross_model_matrix, cross_validate, lookahead_sweep, partitioned_eval, tpr_vs_attribute, undersample};
use drivelife::featurize::{ExampleSet, PartitionAttribute, PartitionRule};
use drivelife::learners::{feature_importance, Matrix, Model};
use drivelife::{seed, Family};
use serde::Serialize;

use crate::artifacts::{cell, Out};
use crate::config::{Partition, RunConfig};
use crate::data::Prepared;
use crate::failure::{CliResult, Failure};

const DEFAULT_SWEEP: [u32; 4] = [0, 1, 2, 7];
const TPR_ALPHAS: [f64; 5] = [0.5, 0.6, 0.7, 0.8, 0.9];

fn examples_name(n: u32) -> String {
    format!("examples_n{n}.csv")
}

fn no_partition(cfg: &RunConfig) -> CliResult<()> {
    match cfg.partition {
        Partition::Rule(rule) => Err(Failure::Usage(format!(
            "`{}` does not partition; run `partition-eval --partition {rule}`",
            cfg.command
        ))),
        Partition::Unset | Partition::None => Ok(()),
    }
}

pub fn featurize(cfg: &RunConfig) -> CliResult<()> {
    let p = Prepared::load(cfg)?;
    let mut lookaheads = if cfg.lookahead.is_empty() { vec![0] } else { cfg.lookahead.clone() };
    lookaheads.sort_unstable();
    lookaheads.dedup();
    let mut out = Out::create(cfg)?;

    #[derive(Serialize)]
    struct Labeled {
        lookahead: u32,
        file: String,
        examples: usize,
        positives: usize,
    }
    let mut sets = Vec::new();
    for n in lookaheads {
        let ex = p.examples(n);
        let file = examples_name(n);
        out.csv_with(&file, |w| Ok(ex.write_csv(w)?))?;
        sets.push(Labeled {
            lookahead: n,
            file,
            examples: ex.len(),
            positives: ex.positives(),
        });
    }

    #[derive(Serialize)]
    struct FeaturizeSummary {
        family: Family,
        features: Vec<String>,
        rows: usize,
        counter_resets: usize,
        partition_key: PartitionAttribute,
        sets: Vec<Labeled>,
    }
    out.json(
        "featurize.json",
        "featurize",
        &FeaturizeSummary {
            family: p.dataset.family(),
            features: p.rows.spec.names.clone(),
            rows: p.rows.len(),
            counter_resets: p.rows.resets,
            partition_key: p.rows.key_attribute,
            sets,
        },
    )
}

fn matrix_of(ex: &ExampleSet, rows: &[usize]) -> CliResult<Matrix> {
    let mut v = Vec::with_capacity(rows.len() * ex.n_features());
    for &i in rows {
        v.extend_from_slice(ex.row(i));
    }
    Ok(Matrix::new(rows.len(), ex.n_features(), v)?)
}

/// Undersampling draws from stream 0 of the seed, the model from stream 1,
/// matching what each cross-validation fold does with its fold seed.
pub fn train(cfg: &RunConfig) -> CliResult<()> {
    let seed = cfg.require_seed()?;
    let n = cfg.single_lookahead()?;
    no_partition(cfg)?;
    let p = Prepared::load(cfg)?;
    let ex = p.examples(n);
    let keep = undersample(&ex.labels, cfg.undersample_ratio, seed::derive(seed, 0))?;
    let x = matrix_of(&ex, &keep)?;
    let y: Vec<bool> = keep.iter().map(|&i| ex.labels[i]).collect();
    let model = cfg.model.fit(&x, &y, &ex.names, seed::derive(seed, 1))?;

    let mut out = Out::create(cfg)?;
    if let Model::RandomForest(forest) = &model {
        let ranking = feature_importance(forest)?;
        out.csv(
            "importance.csv",
            &["rank", "feature", "importance"],
            ranking
                .entries
                .iter()
                .enumerate()
                .map(|(i, (f, v))| vec![(i + 1).to_string(), f.clone(), v.to_string()]),
        )?;
    }

    #[derive(Serialize)]
    struct Trained<'a> {
        lookahead: u32,
        examples: usize,
        positives: usize,
        train_examples: usize,
        train_positives: usize,
        features: &'a [String],
        model: &'a Model,
    }
    out.json(
        "model.json",
        "trained",
        &Trained {
            lookahead: n,
            examples: ex.len(),
            positives: ex.positives(),
            train_examples: keep.len(),
            train_positives: y.iter().filter(|&&v| v).count(),
            features: &ex.names,
            model: &model,
        },
    )
}

pub fn evaluate(cfg: &RunConfig) -> CliResult<()> {
    let eval = cfg.eval_config()?;
    let n = cfg.single_lookahead()?;
    no_partition(cfg)?;
    let p = Prepared::load(cfg)?;
    let ex = p.examples(n);
    let run = cross_validate(&ex, &eval)?;
    let mut out = Out::create(cfg)?;
    out.csv(
        "roc.csv",
        &["alpha", "fpr", "tpr"],
        run.report
            .roc
            .iter()
            .map(|(a, fpr, tpr)| vec![cell(*a), fpr.to_string(), tpr.to_string()]),
    )?;
    out.json("eval_report.json", "report", &run.report)
}

pub fn sweep(cfg: &RunConfig) -> CliResult<()> {
    let eval = cfg.eval_config()?;
    no_partition(cfg)?;
    let lookaheads = if cfg.lookahead.is_empty() { DEFAULT_SWEEP.to_vec() } else { cfg.lookahead.clone() };
    let p = Prepared::load(cfg)?;
    let points = lookahead_sweep(|n| Ok(p.examples(n)), &lookaheads, &eval)?;
    let mut out = Out::create(cfg)?;
    out.csv(
        "sweep.csv",
        &["lookahead", "mean_auroc", "stdev", "scored_folds", "skipped_folds"],
        points.iter().map(|pt| {
            vec![
                pt.lookahead.to_string(),
                cell(pt.report.mean),
                cell(pt.report.stdev),
                pt.report.per_fold_auroc.len().to_string(),
                pt.report.skipped_folds.to_string(),
            ]
        }),
    )?;
    out.json("sweep.json", "sweep", &points)
}

pub fn matrix(cfg: &RunConfig) -> CliResult<()> {
    let eval = cfg.eval_config()?;
    let n = cfg.single_lookahead()?;
    no_partition(cfg)?;
    let p = Prepared::load(cfg)?;
    let m = cross_model_matrix(&p.examples(n), &eval)?;
    let mut out = Out::create(cfg)?;
    let mut rows = Vec::new();
    for (i, train) in m.train_models.iter().enumerate() {
        for (j, test) in m.test_models.iter().enumerate() {
            rows.push(vec![train.clone(), test.clone(), cell(m.cells[i][j]), cell(m.stdev[i][j])]);
        }
    }
    out.csv("matrix.csv", &["train_model", "test_model", "mean_auroc", "stdev"], rows)?;
    out.json("matrix.json", "matrix", &m)
}

/// Bin starts for the TPR-by-key table, in the key's own units.
fn tpr_edges(rule: &PartitionRule) -> Vec<f64> {
    match rule.attribute {
        PartitionAttribute::DriveAge => (0..=16).map(|i| i as f64 * 90.0).collect(),
        PartitionAttribute::HeadFlyingHours => (0..=7).map(|i| i as f64 * 10_000.0).collect(),
    }
}

pub fn partition_eval(cfg: &RunConfig) -> CliResult<()> {
    let eval = cfg.eval_config()?;
    let n = cfg.single_lookahead()?;
    let p = Prepared::load(cfg)?;
    let rule = match cfg.partition {
        Partition::Rule(r) => r,
        Partition::None => return Err(Failure::Usage("partition-eval needs a rule, e.g. --partition age:90".into())),
        Partition::Unset => match p.dataset.family() {
            Family::Ssd => PartitionRule::age(90.0),
            Family::Hdd => PartitionRule::hfh(40_000.0),
        },
    };
    let ex = p.examples(n);
    let report = partitioned_eval(&ex, &rule, &eval)?;
    let bins = tpr_vs_attribute(&ex, &eval, &TPR_ALPHAS, &tpr_edges(&rule))?;
    let mut out = Out::create(cfg)?;
    let mut header = vec!["lo".to_string(), "hi".to_string(), "positives".to_string()];
    header.extend(TPR_ALPHAS.iter().map(|a| format!("tpr_at_{a}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv(
        "tpr.csv",
        &header,
        bins.iter().map(|b| {
            let mut r = vec![b.lo.to_string(), cell(b.hi), b.positives.to_string()];
            r.extend(b.tpr.iter().map(|t| cell(*t)));
            r
        }),
    )?;
    out.json("partition_report.json", "report", &report)
}
