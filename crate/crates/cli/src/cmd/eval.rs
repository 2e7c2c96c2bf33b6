use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::json;
use splatbench::io::{read_cloud, read_prediction, render_markdown_table, write_eval_csv, IoError};
use splatbench::metrics::{
    aggregate, default_thresholds, evaluate, rows_from_record, EvalPair, EvalRecord, GroupKey, Metric,
    MetricConfig,
};

use super::parse_list;
use crate::config::Layers;
use crate::samples::{load_samples, Sample};
use crate::Outcome;

#[derive(clap::Args)]
pub struct Args {
    /// Directory of `<id>.f32` (clean) or `<id>/<kind>_s<level>.f32` predictions.
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth sample manifest or benchmark index.
    #[arg(long)]
    gt: PathBuf,
    /// Comma-separated subset of auc,aiou,sim,mae, or `all`.
    #[arg(long)]
    metrics: Option<String>,
    /// Comma-separated keys among category, affordance, corruption, severity.
    #[arg(long)]
    group_by: Option<String>,
    /// Per-sample CSV; defaults to `<pred>/eval.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn prediction_path(pred_dir: &Path, s: &Sample) -> PathBuf {
    match &s.prediction_path {
        Some(p) if Path::new(p).is_absolute() => PathBuf::from(p),
        Some(p) => pred_dir.join(p),
        None => pred_dir.join(s.relative_stem()).with_extension("f32"),
    }
}

enum Scored {
    Record(EvalRecord),
    Missing(String),
}

fn score(s: &Sample, pred_dir: &Path, config: &MetricConfig) -> Result<Scored> {
    let path = prediction_path(pred_dir, s);
    if !path.exists() {
        return Ok(Scored::Missing(format!("no prediction at {}", path.display())));
    }
    let cloud = read_cloud(&s.cloud_path)?;
    let prediction = match read_prediction(&path, Some(cloud.n_points())) {
        Ok(p) => p,
        Err(e @ IoError::LengthMismatch { .. }) => {
            return Err(e).with_context(|| format!("shape mismatch in {}", path.display()))
        }
        Err(e) => return Err(e.into()),
    };
    let pair = EvalPair::new(prediction.scores, cloud.labels, s.category.clone(), s.affordance.clone())?;
    let report = evaluate(&pair, config)?;
    Ok(Scored::Record(EvalRecord {
        sample_id: s.sample_id,
        category: s.category.clone(),
        affordance: s.affordance.clone(),
        corruption: s.variant.map(|v| v.0),
        severity: s.variant.map(|v| v.1),
        report,
    }))
}

pub fn run(args: Args, layers: &Layers) -> Result<Outcome> {
    let metrics: Vec<Metric> = parse_list(&layers.resolve_string("metrics", args.metrics, "all"), &Metric::ALL)?;
    let samples = load_samples(&args.gt)?;
    if samples.is_empty() {
        bail!("{} lists no samples", args.gt.display());
    }
    let default_group = if samples.iter().any(|s| s.variant.is_some()) { "corruption" } else { "" };
    let group_by: Vec<GroupKey> = parse_list(&layers.resolve_string("group_by", args.group_by, default_group), &[])?;
    let config = MetricConfig {
        metrics: metrics.clone(),
        thresholds: default_thresholds(),
    };
    let scored: Vec<Scored> = samples
        .par_iter()
        .map(|s| score(s, &args.pred, &config))
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (s, r) in samples.iter().zip(scored) {
        match r {
            Scored::Record(rec) => records.push(rec),
            Scored::Missing(reason) => skipped.push(json!({
                "sample": s.relative_stem(),
                "reason": reason,
            })),
        }
    }
    let rows: Vec<_> = records.iter().flat_map(|r| rows_from_record(r, &metrics)).collect();
    let out = args.out.unwrap_or_else(|| args.pred.join("eval.csv"));
    write_eval_csv(&out, &rows)?;

    let mut degenerate: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &records {
        for f in &r.report.flags {
            *degenerate.entry(f.metric.name()).or_insert(0) += 1;
        }
    }
    let groups = aggregate(&records, &group_by);
    let mut text = format!("{} samples evaluated, per-sample rows in {}\n", records.len(), out.display());
    text += &render_markdown_table(&groups, &group_by);
    for (m, n) in &degenerate {
        text += &format!("degenerate {m}: {n} samples excluded\n");
    }
    if !skipped.is_empty() {
        text += "\nskipped:\n";
        for s in &skipped {
            text += &format!("  {}: {}\n", s["sample"].as_str().unwrap_or("?"), s["reason"].as_str().unwrap_or(""));
        }
    }
    let group_json: Vec<_> = groups
        .iter()
        .map(|g| {
            json!({
                "key": g.key,
                "samples": g.samples,
                "means": g.means.iter().map(|(m, v)| (m.name(), *v)).collect::<BTreeMap<_, _>>(),
                "excluded": g.excluded.iter().map(|(m, v)| (m.name(), *v)).collect::<BTreeMap<_, _>>(),
            })
        })
        .collect();
    Ok(Outcome {
        partial: !skipped.is_empty(),
        text,
        json: json!({
            "samples_evaluated": records.len(),
            "csv": out,
            "group_by": group_by.iter().map(|g| g.name()).collect::<Vec<_>>(),
            "groups": group_json,
            "degenerate": degenerate,
            "skipped": skipped,
        }),
    })
}
