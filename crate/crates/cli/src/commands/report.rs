//! Collates whatever the earlier subcommands left in the output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::artifacts::Out;
use crate::config::RunConfig;
use crate::failure::{CliResult, Failure};

/// Stage artifact and the subcommand that writes it.
const STAGES: [(&str, &str); 9] = [
    ("dataset.csv", "`drivelife ingest` or `drivelife synth`"),
    ("lifecycle.json", "`drivelife lifecycle`"),
    ("characterize.json", "`drivelife characterize`"),
    ("featurize.json", "`drivelife featurize`"),
    ("model.json", "`drivelife train`"),
    ("eval_report.json", "`drivelife evaluate`"),
    ("sweep.json", "`drivelife sweep`"),
    ("matrix.json", "`drivelife matrix`"),
    ("partition_report.json", "`drivelife partition-eval`"),
];

const OUTPUTS: [&str; 2] = ["summary.json", "summary.md"];

#[derive(Serialize)]
struct Missing {
    file: &'static str,
    run: &'static str,
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path.display(), e))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    de.disable_recursion_limit();
    let v = Value::deserialize(&mut de).map_err(|e| Failure::Schema(format!("{}: {e}", path.display())))?;
    Ok(v)
}

/// The payload under the non-`meta` key.
fn payload(v: &Value) -> Value {
    v.as_object()
        .and_then(|o| o.iter().find(|(k, _)| *k != "meta").map(|(_, v)| v.clone()))
        .unwrap_or(Value::Null)
}

fn pick(v: &Value, keys: &[&str]) -> Value {
    let mut m = Map::new();
    for k in keys {
        if let Some(x) = v.get(*k) {
            m.insert(k.to_string(), x.clone());
        }
    }
    Value::Object(m)
}

fn eval_brief(r: &Value) -> Value {
    pick(r, &["mean", "stdev", "per_fold_auroc", "skipped_folds"])
}

fn fmt_num(v: &Value) -> String {
    match v.as_f64() {
        Some(x) => format!("{x:.4}"),
        None => "n/a".into(),
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let dir = &cfg.out;
    let present: Vec<(&str, &str)> = STAGES.iter().copied().filter(|(f, _)| dir.join(f).is_file()).collect();
    let missing: Vec<Missing> = STAGES
        .iter()
        .filter(|(f, _)| !dir.join(f).is_file())
        .map(|&(file, run)| Missing { file, run })
        .collect();
    if present.iter().all(|(f, _)| *f == "dataset.csv") {
        let listing: Vec<String> = missing.iter().map(|m| format!("{} (run {})", m.file, m.run)).collect();
        return Err(Failure::Io(format!(
            "nothing to report in {}: missing {}",
            dir.display(),
            listing.join(", ")
        )));
    }

    let mut sections = Map::new();
    let mut md = String::from("# drivelife report\n\n");
    for (file, _) in &present {
        if !file.ends_with(".json") {
            continue;
        }
        let body = payload(&read_json(&dir.join(file))?);
        let stage = file.trim_end_matches(".json");
        let brief = match *file {
            "lifecycle.json" => {
                let b = pick(
                    &body,
                    &["family", "drives", "failures", "failed_drives", "failed_share", "repair_spells", "limbo_spells", "failure_counts", "repair_fractions"],
                );
                let _ = writeln!(
                    md,
                    "## Lifecycle\n\n{} drives, {} failures on {} drives (failed share {}), {} repair spells, {} in limbo.\n",
                    b["drives"], b["failures"], b["failed_drives"], fmt_num(&b["failed_share"]), b["repair_spells"], b["limbo_spells"]
                );
                b
            }
            "characterize.json" => {
                let _ = writeln!(md, "## Characterization\n");
                for a in body.as_array().into_iter().flatten() {
                    let files: Vec<&str> = a["files"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
                    let _ = writeln!(md, "- {}: {}", a["analysis"].as_str().unwrap_or("?"), files.join(", "));
                }
                md.push('\n');
                body
            }
            "featurize.json" => {
                let b = pick(&body, &["family", "rows", "counter_resets", "sets"]);
                let _ = writeln!(md, "## Features\n\n{} feature rows.\n", b["rows"]);
                b
            }
            "model.json" => {
                let b = pick(&body, &["lookahead", "examples", "positives", "train_examples", "train_positives"]);
                let kind = body["model"]["kind"].clone();
                let _ = writeln!(
                    md,
                    "## Trained model\n\n{} at lookahead {}, {} training examples.\n",
                    kind.as_str().unwrap_or("?"),
                    b["lookahead"],
                    b["train_examples"]
                );
                let mut b = b;
                b["kind"] = kind;
                b
            }
            "eval_report.json" => {
                let b = eval_brief(&body);
                let _ = writeln!(
                    md,
                    "## Cross-validation\n\nmean AUROC {} (stdev {}), {} skipped folds.\n",
                    fmt_num(&b["mean"]),
                    fmt_num(&b["stdev"]),
                    b["skipped_folds"]
                );
                b
            }
            "sweep.json" => {
                let _ = writeln!(md, "## Lookahead sweep\n\n| lookahead | mean AUROC | stdev |\n|---|---|---|");
                let rows: Vec<Value> = body
                    .as_array()
                    .into_iter()
                    .flatten()
                    .map(|p| {
                        let _ = writeln!(
                            md,
                            "| {} | {} | {} |",
                            p["lookahead"],
                            fmt_num(&p["report"]["mean"]),
                            fmt_num(&p["report"]["stdev"])
                        );
                        json!({"lookahead": p["lookahead"], "report": eval_brief(&p["report"])})
                    })
                    .collect();
                md.push('\n');
                Value::Array(rows)
            }
            "matrix.json" => {
                let trains: Vec<&str> = body["train_models"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
                let _ = writeln!(md, "## Cross-model matrix\n\nTrained on {}; cells in matrix.csv.\n", trains.join(", "));
                pick(&body, &["train_models", "test_models", "cells"])
            }
            "partition_report.json" => {
                let b = json!({
                    "rule": body["rule"],
                    "below_examples": body["below_examples"],
                    "above_examples": body["above_examples"],
                    "below": eval_brief(&body["below"]),
                    "above": eval_brief(&body["above"]),
                    "unsplit": eval_brief(&body["unsplit"]),
                    "unsplit_on_below": body["unsplit_on_below"],
                    "unsplit_on_above": body["unsplit_on_above"],
                });
                let _ = writeln!(
                    md,
                    "## Partition {}\n\n| side | own model | unsplit model |\n|---|---|---|\n| below | {} | {} |\n| above | {} | {} |\n",
                    body["rule"].as_str().unwrap_or("?"),
                    fmt_num(&body["below"]["mean"]),
                    fmt_num(&body["unsplit_on_below"]),
                    fmt_num(&body["above"]["mean"]),
                    fmt_num(&body["unsplit_on_above"]),
                );
                b
            }
            _ => body,
        };
        sections.insert(stage.to_string(), brief);
    }

    // plot-ready tables: every CSV in the directory
    let mut tables: Vec<String> = fs::read_dir(dir)
        .map_err(|e| Failure::io(dir.display(), e))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv") && !OUTPUTS.contains(&n.as_str()))
        .collect();
    tables.sort();
    let _ = writeln!(md, "## Tables\n");
    for t in &tables {
        let _ = writeln!(md, "- {t}");
    }
    if !missing.is_empty() {
        let _ = writeln!(md, "\n## Not run\n");
        for m in &missing {
            let _ = writeln!(md, "- {}: run {}", m.file, m.run);
        }
    }

    let mut out = Out::create(cfg)?;
    out.json(
        "summary.json",
        "summary",
        &json!({
            "present": present.iter().map(|(f, by)| json!({"file": f, "produced_by": by})).collect::<Vec<_>>(),
            "missing": missing,
            "sections": sections,
            "tables": tables,
        }),
    )?;
    let header = format!("<!-- {} -->\n", out.meta.csv_line().trim_start_matches("# ").trim_end());
    out.text("summary.md", &(header + &md))
}
