//! Evaluation CSV and aggregate CSV/Markdown tables.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::corrupt::CorruptionKind;
use crate::metrics::{GroupKey, GroupRow, Metric};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One metric value of one sample. Column order is fixed:
/// `sample_id, category, affordance, corruption, severity, metric, value, flag`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub sample_id: u64,
    pub category: String,
    pub affordance: String,
    /// Corruption kind name, or `clean`.
    pub corruption: String,
    /// 1..=5, or 0 for the clean cloud.
    pub severity: u8,
    pub metric: String,
    /// Empty when the metric is undefined for this sample.
    pub value: Option<f64>,
    pub flag: String,
}

fn csv_err(e: impl std::fmt::Display) -> IoError {
    IoError::Csv(e.to_string())
}

pub fn write_eval_csv(path: &Path, rows: &[EvalRow]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| IoError::at(path, e))
}

pub fn read_eval_csv(path: &Path) -> Result<Vec<EvalRow>, IoError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let expected = [
        "sample_id",
        "category",
        "affordance",
        "corruption",
        "severity",
        "metric",
        "value",
        "flag",
    ];
    let headers = r.headers().map_err(csv_err)?;
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(IoError::SchemaMismatch(format!(
            "eval csv header {:?}, expected {expected:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Aggregate CSV: the group key columns, `samples`, the four metric means
/// and the four exclusion counts.
pub fn format_aggregate_csv(rows: &[GroupRow], group_by: &[GroupKey]) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = group_by.iter().map(|k| k.name().to_string()).collect();
    header.push("samples".into());
    header.extend(Metric::ALL.iter().map(|m| m.name().to_string()));
    header.extend(Metric::ALL.iter().map(|m| format!("excluded_{}", m.name())));
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        let mut rec = row.key.clone();
        rec.push(row.samples.to_string());
        rec.extend(Metric::ALL.iter().map(|m| fmt_opt(row.means[m])));
        rec.extend(
            Metric::ALL
                .iter()
                .map(|m| row.excluded.get(m).copied().unwrap_or(0).to_string()),
        );
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(csv_err)?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_aggregate_csv(path: &Path, rows: &[GroupRow], group_by: &[GroupKey]) -> Result<(), IoError> {
    let text = format_aggregate_csv(rows, group_by)?;
    std::fs::write(path, text).map_err(|e| IoError::at(path, e))
}

/// AUC and aIoU as percentages with one decimal, SIM and MAE with three.
fn cell(metric: Metric, v: Option<f64>) -> String {
    match (metric, v) {
        (_, None) => "–".to_string(),
        (Metric::Aiou | Metric::Auc, Some(x)) => format!("{:.1}", 100.0 * x),
        (_, Some(x)) => format!("{x:.3}"),
    }
}

/// Markdown table with one row per group and one column per metric.
///
/// Grouping by corruption alone reproduces the robustness-table layout:
/// rows `Clean` (when present) then Scale, Jitter, Rotate, Drop-L, Drop-G,
/// Add-L, Add-G.
pub fn render_markdown_table(rows: &[GroupRow], group_by: &[GroupKey]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "<!-- splatbench report schema {REPORT_SCHEMA_VERSION} -->");
    let by_kind = group_by == [GroupKey::Corruption];
    let key_header: Vec<String> = if by_kind {
        vec!["Type".to_string()]
    } else if group_by.is_empty() {
        vec!["Group".to_string()]
    } else {
        group_by.iter().map(|k| k.name().to_string()).collect()
    };
    let mut header = key_header.clone();
    for m in Metric::ALL {
        let arrow = if m.higher_is_better() { "↑" } else { "↓" };
        header.push(format!("{} {arrow}", m.label()));
    }
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));

    let ordered: Vec<&GroupRow> = if by_kind {
        let rank = |c: Option<CorruptionKind>| match c {
            None => 0,
            Some(k) => 1 + CorruptionKind::TABLE_ORDER.iter().position(|&t| t == k).unwrap(),
        };
        let mut v: Vec<&GroupRow> = rows.iter().collect();
        v.sort_by_key(|r| rank(r.corruption.flatten()));
        v
    } else {
        rows.iter().collect()
    };
    for row in ordered {
        let mut cells: Vec<String> = if by_kind {
            vec![row
                .corruption
                .flatten()
                .map(|k| k.table_label().to_string())
                .unwrap_or_else(|| "Clean".to_string())]
        } else if group_by.is_empty() {
            vec!["all".to_string()]
        } else {
            row.key.clone()
        };
        cells.extend(Metric::ALL.iter().map(|&m| cell(m, row.means[&m])));
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    let mut excluded = [0usize; 4];
    for row in rows {
        for (i, m) in Metric::ALL.iter().enumerate() {
            excluded[i] += row.excluded.get(m).copied().unwrap_or(0);
        }
    }
    if excluded.iter().any(|&e| e > 0) {
        let parts: Vec<String> = Metric::ALL
            .iter()
            .zip(excluded)
            .filter(|(_, e)| *e > 0)
            .map(|(m, e)| format!("{} {e}", m.label()))
            .collect();
        let _ = writeln!(out, "\nExcluded degenerate samples: {}.", parts.join(", "));
    }
    out
}
