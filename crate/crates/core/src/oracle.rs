//! Deliberately naive reference implementations used to cross-check the
//! fast paths: pair counting for AUC, explicit index sets for aIoU, plain
//! loops for SIM, MAE and MSE, and the closed-form transmittance product.
//!
//! Nothing here shares code with [`crate::metrics`] or the rasterizer's
//! blending loop.

use std::collections::BTreeSet;

use crate::metrics::MetricError;
use crate::splat::ViewStack;

fn undefined(metric: &'static str, reason: &str) -> MetricError {
    MetricError::UndefinedMetric {
        metric,
        reason: reason.to_string(),
    }
}

/// AUC as the fraction of (positive, negative) pairs ranked correctly, ties
/// counting one half.
pub fn auc_pairwise(pred: &[f64], gt: &[f64]) -> Result<f64, MetricError> {
    let pos: Vec<f64> = (0..gt.len()).filter(|&i| gt[i] > 0.0).map(|i| pred[i]).collect();
    let neg: Vec<f64> = (0..gt.len()).filter(|&i| gt[i] <= 0.0).map(|i| pred[i]).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(undefined("auc", "one class is empty"));
    }
    let mut credit = 0.0;
    for &p in &pos {
        for &n in &neg {
            if p > n {
                credit += 1.0;
            } else if p == n {
                credit += 0.5;
            }
        }
    }
    Ok(credit / (pos.len() * neg.len()) as f64)
}

/// Mean IoU over `grid`, with each threshold's prediction and ground truth
/// materialized as index sets.
pub fn aiou_sets(pred: &[f64], gt: &[f64], grid: &[f64]) -> Result<f64, MetricError> {
    let truth: BTreeSet<usize> = (0..gt.len()).filter(|&i| gt[i] > 0.0).collect();
    if truth.is_empty() {
        return Err(undefined("aiou", "no positives"));
    }
    let mut total = 0.0;
    for &tau in grid {
        let predicted: BTreeSet<usize> = (0..pred.len()).filter(|&i| pred[i] > tau).collect();
        let inter = predicted.intersection(&truth).count();
        let union = predicted.union(&truth).count();
        total += inter as f64 / union as f64;
    }
    Ok(total / grid.len() as f64)
}

pub fn sim_loop(pred: &[f64], gt: &[f64]) -> f64 {
    let mut sp = 0.0;
    let mut sg = 0.0;
    for i in 0..pred.len() {
        sp += pred[i];
        sg += gt[i];
    }
    let mut s = 0.0;
    for i in 0..pred.len() {
        let a = pred[i] / sp;
        let b = gt[i] / sg;
        s += if a < b { a } else { b };
    }
    s
}

pub fn mae_loop(pred: &[f64], gt: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..pred.len() {
        s += (pred[i] - gt[i]).abs();
    }
    s / pred.len() as f64
}

/// Masked MSE by explicit `(v, c, y, x)` indexing.
pub fn mse_loop(a: &ViewStack, b: &ViewStack, valid: &[bool]) -> f64 {
    let mut s = 0.0;
    let mut n = 0usize;
    for v in 0..a.views {
        for c in 0..a.channels {
            for y in 0..a.height {
                for x in 0..a.width {
                    if valid[(v * a.height + y) * a.width + x] {
                        let d = a.get(v, c, y, x) - b.get(v, c, y, x);
                        s += d * d;
                        n += 1;
                    }
                }
            }
        }
    }
    s / n as f64
}

/// `1 − Π(1 − αᵢ)`.
pub fn alpha_product(alphas: &[f64]) -> f64 {
    1.0 - alphas.iter().map(|a| 1.0 - a).product::<f64>()
}
