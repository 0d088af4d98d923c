//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed. Criterion 11 needs the public Backblaze
//! snapshots under `DRIVELIFE_BACKBLAZE_DIR` and is skipped otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use drivelife::charstats::{hfh_threshold_sweep, spearman};
use drivelife::eval::{auroc, cross_validate, cross_validated_eval, fold_plan, lookahead_sweep, partitioned_eval, undersample, EvalConfig};
use drivelife::featurize::{label_lookahead, make_features, DriveInfo, ExampleSet, PartitionAttribute, PartitionRule};
use drivelife::ingest::{merge_hdd, parse_hdd_csv, parse_ssd_log};
use drivelife::learners::{
    feature_importance, train_forest, train_tree, ForestParams, LogisticObjective, Matrix, ModelSpec, TreeNode, TreeParams,
};
use drivelife::lifecycle::{detect_failures, detect_ssd_failures};
use drivelife::seed;
use drivelife::synthgen::{generate_fleet, SynthConfig};
use drivelife::FleetDataset;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::*;

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("auroc matches pairwise concordance", c1_auroc_oracle),
        ("spearman matches rank-then-pearson", c2_spearman_oracle),
        ("root split matches exhaustive gini search", c3_tree_split_oracle),
        ("logistic gradient matches finite differences", c4_logistic_gradient),
        ("cross-validation protocol invariants", c5_protocol_invariants),
        ("lookahead labels on a hand-built fleet", c6_labeling),
        ("ssd failure days recovered from a synthetic fleet", c7_failure_recovery),
        ("end-to-end predictive sanity", c8_predictive_sanity),
        ("young-side model beats unsplit on young drives", c9_partition_improvement),
        ("uncorrectable errors rank high in importance", c10_importance),
        ("backblaze characterization", c11_backblaze),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Skip(d) => ("SKIP", d),
        };
        println!("criterion {:>2} {tag} {name} ({secs:.1}s): {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    seed::rng_for(0xACCE, stream)
}

fn c1_auroc_oracle() -> Outcome {
    let t = Instant::now();
    let mut r = rng(1);
    let mut checked = 0;
    for trial in 0..1000 {
        let n = r.random_range(2..=200);
        // coarse scores force plenty of ties
        let levels = r.random_range(1..=20);
        let scores: Vec<f64> = (0..n).map(|_| r.random_range(0..levels) as f64 / 4.0).collect();
        let mut labels: Vec<bool> = (0..n).map(|_| r.random_bool(0.3)).collect();
        labels[0] = true;
        labels[1] = false;
        let got = auroc(&scores, &labels).unwrap();
        // twice the concordant pairs plus the tied ones, over twice the pairs
        let (mut num, mut pos, mut neg) = (0u64, 0u64, 0u64);
        for i in 0..n {
            if labels[i] {
                pos += 1;
            } else {
                neg += 1;
            }
            for j in 0..n {
                if labels[i] && !labels[j] {
                    num += if scores[i] > scores[j] {
                        2
                    } else if scores[i] == scores[j] {
                        1
                    } else {
                        0
                    };
                }
            }
        }
        let oracle = num as f64 / (2 * pos * neg) as f64;
        if got != oracle {
            return Fail(format!("trial {trial}: {got} vs oracle {oracle}"));
        }
        checked += 1;
    }
    let secs = t.elapsed().as_secs_f64();
    check(secs < 10.0, format!("{checked} sets exactly equal, {secs:.2}s (limit 10s)"))
}

fn oracle_ranks(v: &[f64]) -> Vec<f64> {
    // rank = 1 + number strictly smaller + half the other ties
    v.iter()
        .map(|a| {
            let less = v.iter().filter(|b| *b < a).count() as f64;
            let equal = v.iter().filter(|b| *b == a).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

fn oracle_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx.sqrt() * vy.sqrt())
}

fn c2_spearman_oracle() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    let mut invariance = 0;
    for trial in 0..1000 {
        let n = r.random_range(3..=100);
        let tied = trial % 2 == 0;
        let draw = |r: &mut ChaCha8Rng| {
            if tied {
                r.random_range(0..8) as f64
            } else {
                r.random_range(-1e3..1e3)
            }
        };
        let x: Vec<f64> = (0..n).map(|_| draw(&mut r)).collect();
        let y: Vec<f64> = (0..n).map(|_| draw(&mut r)).collect();
        let (rx, ry) = (oracle_ranks(&x), oracle_ranks(&y));
        if rx.iter().all(|v| *v == rx[0]) || ry.iter().all(|v| *v == ry[0]) {
            if spearman(&x, &y).is_ok() {
                return Fail(format!("trial {trial}: constant series gave a value"));
            }
            continue;
        }
        let got = spearman(&x, &y).unwrap();
        let want = oracle_pearson(&rx, &ry);
        worst = worst.max((got - want).abs());
        if !tied {
            // strictly increasing transforms keep every rank
            let tx: Vec<f64> = x.iter().map(|v| (v / 100.0).exp()).collect();
            let ty: Vec<f64> = y.iter().map(|v| v * v * v + 5.0 * v).collect();
            if spearman(&tx, &ty).unwrap() != got {
                return Fail(format!("trial {trial}: monotone transform changed the value"));
            }
            invariance += 1;
        }
    }
    check(
        worst <= 1e-12,
        format!("max |diff| {worst:.2e} (limit 1e-12), {invariance} tie-free sets transform-invariant"),
    )
}

/// Best root split by exhaustive search, comparing weighted Gini exactly.
/// Returns `None` when no split exists.
fn oracle_split(rows: &[Vec<f64>], y: &[bool]) -> Option<(usize, f64)> {
    let n = rows.len();
    if y.iter().all(|&l| l) || y.iter().all(|&l| !l) {
        return None;
    }
    // weighted impurity 2*pl*ql/nl + 2*pr*qr/nr as (numerator, denominator)
    let mut best: Option<(u128, u128, usize, f64)> = None;
    for f in 0..rows[0].len() {
        let mut values: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = w[0] / 2.0 + w[1] / 2.0;
            let (mut nl, mut pl, mut nr, mut pr) = (0u128, 0u128, 0u128, 0u128);
            for i in 0..n {
                let p = y[i] as u128;
                if rows[i][f] <= t {
                    nl += 1;
                    pl += p;
                } else {
                    nr += 1;
                    pr += p;
                }
            }
            let num = 2 * pl * (nl - pl) * nr + 2 * pr * (nr - pr) * nl;
            let den = nl * nr;
            let better = match best {
                None => true,
                Some((bn, bd, _, _)) => num * bd < bn * den,
            };
            if better {
                best = Some((num, den, f, t));
            }
        }
    }
    best.map(|(_, _, f, t)| (f, t))
}

fn c3_tree_split_oracle() -> Outcome {
    let mut r = rng(3);
    let mut splits = 0;
    for trial in 0..200 {
        let n = r.random_range(1..=50);
        let p = r.random_range(1..=4);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| r.random_range(0..6) as f64 * 0.5).collect())
            .collect();
        let y: Vec<bool> = (0..n).map(|_| r.random_bool(0.4)).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let model = train_tree(&x, &y, &TreeParams::default(), trial).unwrap();
        let got = match &model.root {
            TreeNode::Split { feature, threshold, .. } => Some((*feature, *threshold)),
            TreeNode::Leaf { .. } => None,
        };
        let want = oracle_split(&rows, &y);
        if got != want {
            return Fail(format!("trial {trial}: tree {got:?}, oracle {want:?}"));
        }
        splits += want.is_some() as usize;
    }
    Pass(format!("200 datasets agree ({splits} with a split)"))
}

fn c4_logistic_gradient() -> Outcome {
    let mut r = rng(4);
    let rows: Vec<Vec<f64>> = (0..60).map(|_| (0..4).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
    let y: Vec<bool> = rows.iter().map(|v| v[0] - 0.5 * v[2] + r.random_range(-1.0..1.0) > 0.0).collect();
    let x = Matrix::from_rows(&rows).unwrap();
    let obj = LogisticObjective::new(&x, &y, 0.1).unwrap();
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let w: Vec<f64> = (0..obj.dim()).map(|_| r.random_range(-3.0..3.0)).collect();
        let g = obj.gradient(&w);
        let fd: Vec<f64> = (0..w.len())
            .map(|j| {
                let (mut a, mut b) = (w.clone(), w.clone());
                a[j] += h;
                b[j] -= h;
                (obj.loss(&a) - obj.loss(&b)) / (2.0 * h)
            })
            .collect();
        let diff = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale = g.iter().map(|a| a * a).sum::<f64>().sqrt().max(fd.iter().map(|a| a * a).sum::<f64>().sqrt());
        worst = worst.max(diff / scale);
    }
    check(worst < 1e-5, format!("max relative error {worst:.2e} at 50 points (limit 1e-5)"))
}

fn random_examples(r: &mut ChaCha8Rng) -> ExampleSet {
    let n_drives = r.random_range(6..30);
    let p = 3;
    let mut ex = ExampleSet {
        names: (0..p).map(|j| format!("f{j}")).collect(),
        drives: Vec::new(),
        values: Vec::new(),
        labels: Vec::new(),
        drive: Vec::new(),
        day: Vec::new(),
        partition_key: Vec::new(),
        key_attribute: PartitionAttribute::DriveAge,
        lookahead: Some(0),
    };
    for d in 0..n_drives {
        ex.drives.push(DriveInfo {
            id: Arc::from(format!("d{d:02}").as_str()),
            model: "m".into(),
        });
        for day in 0..r.random_range(5..40) {
            let label = r.random_bool(0.1);
            ex.values.extend((0..p).map(|j| r.random_range(0.0..1.0) + if label && j == 0 { 0.5 } else { 0.0 }));
            ex.labels.push(label);
            ex.drive.push(d);
            ex.day.push(day);
            ex.partition_key.push(day as f64);
        }
    }
    ex
}

fn c5_protocol_invariants() -> Outcome {
    let mut r = rng(5);
    let mut folds_checked = 0;
    for trial in 0..100 {
        let ex = random_examples(&mut r);
        let k = r.random_range(2..=5);
        let cfg = EvalConfig {
            model: if trial % 2 == 0 {
                ModelSpec::decision_tree()
            } else {
                ModelSpec::logistic()
            },
            folds: k,
            seed: r.random(),
            ..Default::default()
        };
        let run = cross_validate(&ex, &cfg).unwrap();
        let plan = fold_plan(&ex, k, cfg.seed).unwrap();
        let fold_of: Vec<usize> = (0..ex.len()).map(|i| plan.fold_of(ex.drive_id(i)).unwrap()).collect();
        for out in &run.report.per_fold {
            let f = out.fold;
            let test_drives: BTreeSet<&str> = (0..ex.len()).filter(|&i| fold_of[i] == f).map(|i| ex.drive_id(i).as_ref()).collect();
            let train_drives: BTreeSet<&str> = (0..ex.len()).filter(|&i| fold_of[i] != f).map(|i| ex.drive_id(i).as_ref()).collect();
            if !test_drives.is_disjoint(&train_drives) {
                return Fail(format!("trial {trial} fold {f}: a drive is on both sides"));
            }
            let test_n = fold_of.iter().filter(|&&g| g == f).count();
            let test_pos = (0..ex.len()).filter(|&i| fold_of[i] == f && ex.labels[i]).count();
            if out.test_examples != test_n || out.test_positives != test_pos {
                return Fail(format!("trial {trial} fold {f}: test fold altered"));
            }
            let pool_pos = (0..ex.len()).filter(|&i| fold_of[i] != f && ex.labels[i]).count();
            let pool_neg = (0..ex.len()).filter(|&i| fold_of[i] != f && !ex.labels[i]).count();
            if pool_pos == 0 || pool_neg == 0 {
                continue;
            }
            let kept_neg = out.train_examples - out.train_positives;
            if out.train_positives != pool_pos || kept_neg != pool_pos.min(pool_neg) {
                return Fail(format!(
                    "trial {trial} fold {f}: trained on {} positives / {kept_neg} negatives from {pool_pos}/{pool_neg}",
                    out.train_positives
                ));
            }
            if pool_neg >= pool_pos && kept_neg != out.train_positives {
                return Fail(format!("trial {trial} fold {f}: training ratio not 1:1"));
            }
            folds_checked += 1;
        }
        for (i, s) in run.scores.iter().enumerate() {
            if s.is_none() && run.report.per_fold[fold_of[i]].train_examples > 0 {
                return Fail(format!("trial {trial}: example {i} never scored"));
            }
        }
        let again = cross_validated_eval(&ex, &cfg).unwrap();
        if serde_json::to_vec(&again).unwrap() != serde_json::to_vec(&run.report).unwrap() {
            return Fail(format!("trial {trial}: same seed gave different report bytes"));
        }
    }
    Pass(format!("100 evaluations, {folds_checked} trained folds checked"))
}

const DAY_US: u64 = 86_400_000_000;

fn ssd_row(out: &mut String, drive: &str, day: u64, active: bool, swap: bool) {
    let t = day * DAY_US;
    if swap {
        out.push_str(&format!("{drive},MLC-A,{t},,,,,,,,,,,,,,,,,,,1\n"));
        return;
    }
    let (rw, dead) = if active { (100, 0) } else { (0, 1) };
    out.push_str(&format!("{drive},MLC-A,{t},{rw},{rw},0,{day},{dead},0,0,0,0,0,0,0,0,0,0,0,0,0,0\n"));
}

fn c6_labeling() -> Outcome {
    let mut csv = String::from(
        "drive_id,model,timestamp_us,read_ops,write_ops,erase_ops,pe_cycles_cum,dead,read_only,\
         bad_blocks_factory_cum,bad_blocks_new_cum,err_correctable,err_erase,err_final_read,err_final_write,\
         err_meta,err_read,err_response,err_timeout,err_uncorrectable,err_write,swap_event\n",
    );
    // a: healthy for ten days
    for d in 0..10 {
        ssd_row(&mut csv, "a", d, true, false);
    }
    // b: last active day 5, two unlogged days, swap on 8
    for d in 0..=5 {
        ssd_row(&mut csv, "b", d, true, false);
    }
    ssd_row(&mut csv, "b", 8, false, true);
    // c: active to day 3, dead on 4 and 5, swap on 7
    for d in 0..=3 {
        ssd_row(&mut csv, "c", d, true, false);
    }
    ssd_row(&mut csv, "c", 4, false, false);
    ssd_row(&mut csv, "c", 5, false, false);
    ssd_row(&mut csv, "c", 7, false, true);
    // d: fails on 2 (swap 3), back on 10, fails on 14 (swap 16)
    for d in 0..=2 {
        ssd_row(&mut csv, "d", d, true, false);
    }
    ssd_row(&mut csv, "d", 3, false, true);
    for d in 10..=14 {
        ssd_row(&mut csv, "d", d, true, false);
    }
    ssd_row(&mut csv, "d", 16, false, true);
    // e: twenty active days, swapped the day after the last
    for d in 0..20 {
        ssd_row(&mut csv, "e", d, true, false);
    }
    ssd_row(&mut csv, "e", 20, false, true);

    let ds = parse_ssd_log(csv.as_bytes(), "fixture").unwrap();
    let failures = detect_failures(&ds).unwrap();
    let rows = make_features(&ds).unwrap();

    let all_rows: Vec<(&str, i64)> = [
        ("a", (0..10).collect::<Vec<i64>>()),
        ("b", (0..=5).collect()),
        ("c", (0..=3).collect()),
        ("d", vec![0, 1, 2, 10, 11, 12, 13, 14]),
        ("e", (0..20).collect()),
    ]
    .into_iter()
    .flat_map(|(d, days)| days.into_iter().map(move |x| (d, x)))
    .collect();
    let expected: [(u32, Vec<(&str, i64)>); 4] = [
        (0, vec![("b", 5), ("c", 3), ("d", 2), ("d", 14), ("e", 19)]),
        (1, vec![("b", 4), ("b", 5), ("c", 2), ("c", 3), ("d", 1), ("d", 2), ("d", 13), ("d", 14), ("e", 18), ("e", 19)]),
        (
            2,
            vec![
                ("b", 3),
                ("b", 4),
                ("b", 5),
                ("c", 1),
                ("c", 2),
                ("c", 3),
                ("d", 0),
                ("d", 1),
                ("d", 2),
                ("d", 12),
                ("d", 13),
                ("d", 14),
                ("e", 17),
                ("e", 18),
                ("e", 19),
            ],
        ),
        (
            7,
            vec![
                ("b", 0),
                ("b", 1),
                ("b", 2),
                ("b", 3),
                ("b", 4),
                ("b", 5),
                ("c", 0),
                ("c", 1),
                ("c", 2),
                ("c", 3),
                ("d", 0),
                ("d", 1),
                ("d", 2),
                ("d", 10),
                ("d", 11),
                ("d", 12),
                ("d", 13),
                ("d", 14),
                ("e", 12),
                ("e", 13),
                ("e", 14),
                ("e", 15),
                ("e", 16),
                ("e", 17),
                ("e", 18),
                ("e", 19),
            ],
        ),
    ];
    let mut counts = Vec::new();
    for (n, positives) in &expected {
        let ex = label_lookahead(&rows, &failures, *n);
        let got: Vec<(&str, i64, bool)> = (0..ex.len()).map(|i| (ex.drive_id(i).as_ref(), ex.day[i], ex.labels[i])).collect();
        let want: Vec<(&str, i64, bool)> = all_rows.iter().map(|&(d, x)| (d, x, positives.contains(&(d, x)))).collect();
        if got != want {
            return Fail(format!("N={n}: labels differ from the hand enumeration"));
        }
        counts.push(ex.positives());
    }
    check(
        counts.windows(2).all(|w| w[0] <= w[1]),
        format!("N=0,1,2,7 exact; positives {counts:?}"),
    )
}

fn c7_failure_recovery() -> Outcome {
    let t = Instant::now();
    let cfg = SynthConfig {
        seed: 7,
        ..SynthConfig::ssd()
    };
    let fleet = generate_fleet(&cfg).unwrap();
    let detected = detect_ssd_failures(&fleet.dataset).unwrap();
    let by_key: BTreeMap<(&str, u32), i64> = detected.iter().map(|f| ((f.drive.as_ref(), f.ordinal), f.day)).collect();
    let (mut exact, mut near, mut missed) = (0, 0, 0);
    for truth in &fleet.truth {
        match by_key.get(&(truth.drive.as_ref(), truth.ordinal)) {
            Some(&d) if d == truth.failure_day => exact += 1,
            Some(&d) if (d - truth.failure_day).abs() <= cfg.inactivity.max_days as i64 => near += 1,
            _ => missed += 1,
        }
    }
    let total = fleet.truth.len();
    let secs = t.elapsed().as_secs_f64();
    check(
        total > 0 && exact as f64 >= 0.99 * total as f64 && missed == 0 && detected.len() == total && secs < 60.0,
        format!("{exact}/{total} exact, {near} within the inactivity run, {missed} missed, {secs:.1}s"),
    )
}

fn c8_predictive_sanity() -> Outcome {
    let t = Instant::now();
    let cfg = SynthConfig {
        seed: 8,
        ..SynthConfig::ssd()
    };
    let fleet = generate_fleet(&cfg).unwrap();
    let failures = detect_failures(&fleet.dataset).unwrap();
    let rows = make_features(&fleet.dataset).unwrap();
    let ecfg = EvalConfig {
        seed: 8,
        ..Default::default()
    };
    let sweep = lookahead_sweep(|n| Ok(label_lookahead(&rows, &failures, n)), &[0, 1, 2, 7], &ecfg).unwrap();
    let rf: Vec<f64> = sweep.iter().map(|p| p.report.mean.unwrap_or(f64::NAN)).collect();
    let ex0 = label_lookahead(&rows, &failures, 0);
    let lr = cross_validated_eval(
        &ex0,
        &EvalConfig {
            model: ModelSpec::logistic(),
            ..ecfg.clone()
        },
    )
    .unwrap()
    .mean
    .unwrap_or(f64::NAN);
    let secs = t.elapsed().as_secs_f64();
    let monotone = rf.windows(2).all(|w| w[1] <= w[0] + 0.01);
    check(
        rf[0] >= 0.85 && monotone && rf[0] >= lr - 0.02 && secs < 300.0,
        format!(
            "RF AUROC N=0,1,2,7 {:.3} {:.3} {:.3} {:.3}, logistic {lr:.3}, {secs:.0}s",
            rf[0], rf[1], rf[2], rf[3]
        ),
    )
}

fn c9_partition_improvement() -> Outcome {
    let cfg = SynthConfig {
        seed: 9,
        ..SynthConfig::ssd_infant_planted()
    };
    let fleet = generate_fleet(&cfg).unwrap();
    let failures = detect_failures(&fleet.dataset).unwrap();
    let rows = make_features(&fleet.dataset).unwrap();
    let ex = label_lookahead(&rows, &failures, 0);
    let rule = PartitionRule::age(cfg.infant_days as f64);
    let rep = partitioned_eval(
        &ex,
        &rule,
        &EvalConfig {
            seed: 9,
            ..Default::default()
        },
    )
    .unwrap();
    let (Some(young), Some(unsplit)) = (rep.below.as_ref().and_then(|r| r.mean), rep.unsplit_on_below) else {
        return Fail("young side has no AUROC".into());
    };
    check(
        young >= unsplit + 0.02,
        format!("young-side {young:.3} vs unsplit on young {unsplit:.3} (need +0.02)"),
    )
}

fn c10_importance() -> Outcome {
    let mut hits = 0;
    let mut ranks = Vec::new();
    for s in 0..10u64 {
        let cfg = SynthConfig {
            seed: 100 + s,
            ..SynthConfig::ssd()
        };
        let fleet = generate_fleet(&cfg).unwrap();
        let failures = detect_failures(&fleet.dataset).unwrap();
        let ex = label_lookahead(&make_features(&fleet.dataset).unwrap(), &failures, 0);
        let keep = undersample(&ex.labels, 1.0, s).unwrap();
        let x = Matrix::new(ex.len(), ex.n_features(), ex.values.clone()).unwrap().select(&keep);
        let y: Vec<bool> = keep.iter().map(|&i| ex.labels[i]).collect();
        let model = train_forest(&x, &y, &ex.names, &ForestParams::default(), s).unwrap();
        let ranking = feature_importance(&model).unwrap();
        let rank = ranking.entries.iter().position(|(n, _)| n == "err_uncorrectable").unwrap() + 1;
        ranks.push(rank);
        hits += (rank <= 2) as usize;
    }
    check(hits >= 9, format!("top-2 in {hits}/10 runs, ranks {ranks:?}"))
}

fn load_backblaze(dir: &Path) -> drivelife::Result<FleetDataset> {
    let mut files: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    files.sort();
    let mut parts = Vec::with_capacity(files.len());
    for f in files {
        parts.push(parse_hdd_csv(std::fs::File::open(&f)?, &f.display().to_string())?);
    }
    merge_hdd(parts, &dir.display().to_string())
}

fn c11_backblaze() -> Outcome {
    let Some(dir) = std::env::var_os("DRIVELIFE_BACKBLAZE_DIR") else {
        return Skip("DRIVELIFE_BACKBLAZE_DIR not set".into());
    };
    let ds = match load_backblaze(Path::new(&dir)) {
        Ok(ds) => ds,
        Err(e) => return Fail(format!("loading {}: {e}", Path::new(&dir).display())),
    };
    let failures = detect_failures(&ds).unwrap();
    let failed: BTreeSet<&str> = failures.iter().map(|f| f.drive.as_ref()).collect();
    let models = ds.drive_models();
    let share = |m: Option<&str>| {
        let pop: Vec<&str> = models
            .iter()
            .filter(|(_, model)| m.is_none_or(|m| model.as_str() == m))
            .map(|(id, _)| id.as_ref())
            .collect();
        pop.iter().filter(|id| failed.contains(*id)).count() as f64 / pop.len().max(1) as f64
    };
    let st3000 = share(Some("ST3000DM001"));
    let overall = share(None);
    let sweep = hfh_threshold_sweep(&failures, &ds, &[40_000.0]).unwrap();
    let large_share = sweep[0].large_share.unwrap_or(f64::NAN);
    let large_rate = sweep[0].large_rate.unwrap_or(f64::NAN);
    check(
        (st3000 - 0.3189).abs() <= 0.005
            && (overall - 0.0701).abs() <= 0.005
            && (large_share - 0.20).abs() <= 0.03
            && (large_rate - 0.17).abs() <= 0.02,
        format!(
            "ST3000DM001 {:.2}%, overall {:.2}%, large-HFH share {:.1}%, large-HFH rate {:.1}%",
            100.0 * st3000,
            100.0 * overall,
            100.0 * large_share,
            100.0 * large_rate
        ),
    )
}
