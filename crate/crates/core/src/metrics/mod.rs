//! Per-point heatmap metrics and the feature consistency diagnostic.
//!
//! Ground truth is binarized at `> 0` for AUC and aIoU. Undefined cases
//! (no positives, no negatives, zero-mass maps) are errors at the function
//! level and flags in a [`MetricReport`], never silent zeros.

mod aggregate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::splat::ViewStack;

pub use aggregate::{aggregate, records_from_rows, rows_from_record, EvalRecord, GroupKey, GroupRow};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("{metric} undefined: {reason}")]
    UndefinedMetric { metric: &'static str, reason: String },
    #[error("length mismatch: prediction {prediction}, ground truth {ground_truth}")]
    LengthMismatch { prediction: usize, ground_truth: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{which} value out of [0, 1] at index {index}: {value}")]
    OutOfRange {
        which: &'static str,
        index: usize,
        value: f64,
    },
}

fn undefined(metric: &'static str, reason: impl Into<String>) -> MetricError {
    MetricError::UndefinedMetric {
        metric,
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Aiou,
    Auc,
    Sim,
    Mae,
}

impl Metric {
    /// Column order of the published tables.
    pub const ALL: [Metric; 4] = [Metric::Aiou, Metric::Auc, Metric::Sim, Metric::Mae];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Aiou => "aiou",
            Metric::Auc => "auc",
            Metric::Sim => "sim",
            Metric::Mae => "mae",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::Aiou => "aIoU",
            Metric::Auc => "AUC",
            Metric::Sim => "SIM",
            Metric::Mae => "MAE",
        }
    }

    pub fn higher_is_better(self) -> bool {
        self != Metric::Mae
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

/// The default aIoU grid `0.05, 0.10, ..., 0.95`, computed as `k / 20`.
pub fn default_thresholds() -> Vec<f64> {
    (1..20).map(|k| k as f64 / 20.0).collect()
}

/// Prediction and ground truth for one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalPair {
    pub prediction: Vec<f64>,
    pub ground_truth: Vec<f64>,
    pub category: String,
    pub affordance: String,
}

impl EvalPair {
    pub fn new(
        prediction: Vec<f64>,
        ground_truth: Vec<f64>,
        category: impl Into<String>,
        affordance: impl Into<String>,
    ) -> Result<Self, MetricError> {
        check_pair(&prediction, &ground_truth)?;
        for (which, v) in [("prediction", &prediction), ("ground truth", &ground_truth)] {
            if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
                return Err(MetricError::OutOfRange { which, index, value });
            }
        }
        Ok(Self {
            prediction,
            ground_truth,
            category: category.into(),
            affordance: affordance.into(),
        })
    }
}

fn check_pair(pred: &[f64], gt: &[f64]) -> Result<(), MetricError> {
    if pred.len() != gt.len() {
        return Err(MetricError::LengthMismatch {
            prediction: pred.len(),
            ground_truth: gt.len(),
        });
    }
    Ok(())
}

fn count_positives(gt: &[f64], metric: &'static str) -> Result<usize, MetricError> {
    let pos = gt.iter().filter(|&&g| g > 0.0).count();
    if pos == 0 {
        return Err(undefined(metric, "ground truth has no positive points"));
    }
    Ok(pos)
}

/// Area under the ROC curve via the Mann–Whitney U statistic, average ranks
/// for ties.
pub fn auc(pred: &[f64], gt: &[f64]) -> Result<f64, MetricError> {
    check_pair(pred, gt)?;
    let pos = count_positives(gt, "auc")?;
    let neg = gt.len() - pos;
    if neg == 0 {
        return Err(undefined("auc", "ground truth has no negative points"));
    }
    let mut order: Vec<usize> = (0..pred.len()).collect();
    order.sort_by(|&a, &b| pred[a].total_cmp(&pred[b]));
    let mut rank_sum_pos = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pred[order[end]] == pred[order[start]] {
            end += 1;
        }
        // 1-based ranks start+1 ..= end share their mean.
        let avg_rank = (start + 1 + end) as f64 / 2.0;
        let tied_pos = order[start..end].iter().filter(|&&i| gt[i] > 0.0).count();
        rank_sum_pos += avg_rank * tied_pos as f64;
        start = end;
    }
    let u = rank_sum_pos - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64))
}

/// IoU of `pred > tau` against `gt > 0`.
pub fn iou_at(pred: &[f64], gt: &[f64], tau: f64) -> Result<f64, MetricError> {
    check_pair(pred, gt)?;
    count_positives(gt, "aiou")?;
    let (mut tp, mut fp, mut fne) = (0usize, 0usize, 0usize);
    for (&p, &g) in pred.iter().zip(gt) {
        match (p > tau, g > 0.0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fne += 1,
            (false, false) => {}
        }
    }
    Ok(tp as f64 / (tp + fp + fne) as f64)
}

/// Mean IoU over `thresholds`.
pub fn aiou(pred: &[f64], gt: &[f64], thresholds: &[f64]) -> Result<f64, MetricError> {
    if thresholds.is_empty() {
        return Err(undefined("aiou", "empty threshold grid"));
    }
    let mut total = 0.0;
    for &t in thresholds {
        total += iou_at(pred, gt, t)?;
    }
    Ok(total / thresholds.len() as f64)
}

/// Histogram intersection of the two maps after normalizing each to unit
/// mass.
pub fn sim(pred: &[f64], gt: &[f64]) -> Result<f64, MetricError> {
    check_pair(pred, gt)?;
    let sp: f64 = pred.iter().sum();
    let sg: f64 = gt.iter().sum();
    if !(sp > 0.0) {
        return Err(undefined("sim", "prediction has zero mass"));
    }
    if !(sg > 0.0) {
        return Err(undefined("sim", "ground truth has zero mass"));
    }
    Ok(pred
        .iter()
        .zip(gt)
        .map(|(&p, &g)| (p / sp).min(g / sg))
        .sum())
}

pub fn mae(pred: &[f64], gt: &[f64]) -> Result<f64, MetricError> {
    check_pair(pred, gt)?;
    if pred.is_empty() {
        return Err(undefined("mae", "no points"));
    }
    let total: f64 = pred.iter().zip(gt).map(|(p, g)| (p - g).abs()).sum();
    Ok(total / pred.len() as f64)
}

/// Mean squared difference between two `V×D×H×W` feature stacks over the
/// pixels where `valid` (`V×H×W`) is set, across all channels.
pub fn consistency_mse(a: &ViewStack, b: &ViewStack, valid: &[bool]) -> Result<f64, MetricError> {
    if a.shape() != b.shape() {
        return Err(MetricError::DimensionMismatch(format!(
            "{:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let plane = a.height * a.width;
    if valid.len() != a.views * plane {
        return Err(MetricError::DimensionMismatch(format!(
            "mask has {} entries, expected {}",
            valid.len(),
            a.views * plane
        )));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in 0..a.views {
        let mask = &valid[v * plane..(v + 1) * plane];
        for c in 0..a.channels {
            let pa = a.plane(v, c);
            let pb = b.plane(v, c);
            for ((&x, &y), &m) in pa.iter().zip(pb).zip(mask) {
                if m {
                    sum += (x - y) * (x - y);
                    count += 1;
                }
            }
        }
    }
    if count == 0 || a.channels == 0 {
        return Err(undefined("consistency_mse", "no valid pixels"));
    }
    Ok(sum / count as f64)
}

/// Which metrics to compute and the aIoU grid.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricConfig {
    pub metrics: Vec<Metric>,
    pub thresholds: Vec<f64>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            metrics: Metric::ALL.to_vec(),
            thresholds: default_thresholds(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegenerateFlag {
    pub metric: Metric,
    pub reason: String,
}

/// Metric values for one sample; `None` where a metric was not requested or
/// is undefined (the latter carries a flag).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub auc: Option<f64>,
    pub aiou: Option<f64>,
    pub sim: Option<f64>,
    pub mae: Option<f64>,
    pub flags: Vec<DegenerateFlag>,
    pub thresholds: Vec<f64>,
}

impl MetricReport {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Auc => self.auc,
            Metric::Aiou => self.aiou,
            Metric::Sim => self.sim,
            Metric::Mae => self.mae,
        }
    }

    pub fn set(&mut self, metric: Metric, value: Option<f64>) {
        let slot = match metric {
            Metric::Auc => &mut self.auc,
            Metric::Aiou => &mut self.aiou,
            Metric::Sim => &mut self.sim,
            Metric::Mae => &mut self.mae,
        };
        *slot = value;
    }

    pub fn flag(&self, metric: Metric) -> Option<&str> {
        self.flags
            .iter()
            .find(|f| f.metric == metric)
            .map(|f| f.reason.as_str())
    }
}

/// Computes every configured metric. Shape errors abort; undefined metrics
/// become flags.
pub fn evaluate(pair: &EvalPair, config: &MetricConfig) -> Result<MetricReport, MetricError> {
    let (p, g) = (&pair.prediction, &pair.ground_truth);
    check_pair(p, g)?;
    let mut report = MetricReport {
        thresholds: config.thresholds.clone(),
        ..Default::default()
    };
    for &metric in &config.metrics {
        let result = match metric {
            Metric::Auc => auc(p, g),
            Metric::Aiou => aiou(p, g, &config.thresholds),
            Metric::Sim => sim(p, g),
            Metric::Mae => mae(p, g),
        };
        match result {
            Ok(v) => report.set(metric, Some(v)),
            Err(MetricError::UndefinedMetric { reason, .. }) => {
                report.flags.push(DegenerateFlag { metric, reason })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}
