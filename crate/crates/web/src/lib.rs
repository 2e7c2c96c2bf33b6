//! Browser bindings for the demo page in `www/`.
//!
//! Three operations are exposed: corrupt-and-render a procedural cloud to
//! RGBA pixels, score a noisy prediction against its labels, and list the
//! available shapes and corruption kinds. The plain Rust functions below do
//! the work and are tested natively; the `#[wasm_bindgen]` wrappers only
//! convert errors.

use serde_json::json;
use splatbench::corrupt::{apply, corruption_lineage, CorruptionSpec};
use splatbench::metrics::{evaluate, EvalPair, MetricConfig};
use splatbench::splat::{
    colormap_depth, init_gaussians, rasterize, rig_for_cloud, ColorMode, DepthColormap, RigConfig,
};
use splatbench::synthetic::{generate, Shape};
use splatbench::{derive_stream, CorruptionKind, LabeledCloud, RngStream, SeverityLevel};
use wasm_bindgen::prelude::*;

pub const DEMO_POINTS: usize = 2048;
const BACKGROUND: [u8; 3] = [24, 24, 28];

fn shape(name: &str) -> Result<Shape, String> {
    Shape::from_name(name).ok_or_else(|| format!("unknown shape {name:?}"))
}

/// The clean shape and, unless `kind` is `clean`, its corrupted variant.
pub fn demo_clouds(shape_name: &str, kind: &str, severity: u8, seed: u64) -> Result<(LabeledCloud, LabeledCloud), String> {
    let clean = generate(shape(shape_name)?, DEMO_POINTS, seed);
    if kind.eq_ignore_ascii_case("clean") {
        return Ok((clean.clone(), clean));
    }
    let kind: CorruptionKind = kind.parse().map_err(|e| format!("{e}"))?;
    let severity = SeverityLevel::new(severity).ok_or_else(|| format!("severity must be 1..=5, got {severity}"))?;
    let lineage = corruption_lineage(seed, 0, kind, severity);
    let spec = CorruptionSpec::new(kind, severity, RngStream::new(lineage));
    let corrupted = apply(&clean, &spec).map_err(|e| e.to_string())?;
    Ok((clean, corrupted))
}

/// Renders one view as `res × res` RGBA bytes. `mode` is `affordance`
/// (label mask in grayscale) or `depth` (turbo colormap). The camera rig is
/// fitted to the clean shape so corruptions move relative to a fixed frame.
#[allow(clippy::too_many_arguments)]
pub fn render_rgba(
    shape_name: &str,
    kind: &str,
    severity: u8,
    seed: u64,
    view: usize,
    views: usize,
    res: usize,
    mode: &str,
) -> Result<Vec<u8>, String> {
    let (clean, cloud) = demo_clouds(shape_name, kind, severity, seed)?;
    let cfg = RigConfig {
        views,
        height: res,
        width: res,
        ..Default::default()
    };
    let rig = rig_for_cloud(&clean, &cfg).map_err(|e| e.to_string())?;
    if view >= views {
        return Err(format!("view {view} out of range for {views} views"));
    }
    let mut rig = rig;
    rig.poses = vec![rig.poses.swap_remove(view)];
    let g = init_gaussians(&cloud, 0.02, 0.9, ColorMode::Affordance).map_err(|e| e.to_string())?;
    let out = rasterize(&g, &rig);
    let alpha = out.alpha.plane(0, 0);
    let n = res * res;
    let mut rgba = Vec::with_capacity(4 * n);
    match mode {
        "affordance" => {
            let c = out.color.plane(0, 0);
            for p in 0..n {
                // Composite the premultiplied mask over the background.
                let bg = 1.0 - alpha[p];
                for b in BACKGROUND {
                    let v = c[p] * 255.0 + bg * b as f64;
                    rgba.push(v.round().clamp(0.0, 255.0) as u8);
                }
                rgba.push(255);
            }
        }
        "depth" => {
            let img = colormap_depth(&out.depth, &out.alpha, DepthColormap::Turbo).images;
            for p in 0..n {
                let covered = alpha[p] > splatbench::splat::VALID_ALPHA;
                for (ch, b) in BACKGROUND.iter().enumerate() {
                    let v = if covered { img.plane(0, ch)[p] * 255.0 } else { *b as f64 };
                    rgba.push(v.round() as u8);
                }
                rgba.push(255);
            }
        }
        other => return Err(format!("unknown mode {other:?}")),
    }
    Ok(rgba)
}

/// Scores `clamp(label + noise·N(0, 1))` against the labels of the
/// (possibly corrupted) cloud. Returns JSON with the four metrics, point
/// counts and any degenerate-metric flags.
pub fn score_noisy(shape_name: &str, kind: &str, severity: u8, seed: u64, noise: f64) -> Result<String, String> {
    let (clean, cloud) = demo_clouds(shape_name, kind, severity, seed)?;
    let mut s = derive_stream(seed, 1, 0xDE30);
    let pred: Vec<f64> = cloud
        .labels
        .iter()
        .map(|&l| (l + noise * s.normal()).clamp(0.0, 1.0))
        .collect();
    let positives = cloud.labels.iter().filter(|&&l| l > 0.0).count();
    let pair = EvalPair::new(pred, cloud.labels.clone(), "", "").map_err(|e| e.to_string())?;
    let r = evaluate(&pair, &MetricConfig::default()).map_err(|e| e.to_string())?;
    Ok(json!({
        "points_before": clean.n_points(),
        "points_after": cloud.n_points(),
        "positives": positives,
        "auc": r.auc,
        "aiou": r.aiou,
        "sim": r.sim,
        "mae": r.mae,
        "flags": r.flags.iter().map(|f| format!("{}: {}", f.metric, f.reason)).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Shape names and corruption kinds in table order, as JSON.
pub fn catalog_json() -> String {
    json!({
        "shapes": Shape::ALL.iter().map(|s| s.name()).collect::<Vec<_>>(),
        "kinds": CorruptionKind::TABLE_ORDER
            .iter()
            .map(|k| json!({ "name": k.name(), "label": k.table_label() }))
            .collect::<Vec<_>>(),
    })
    .to_string()
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn render(
    shape: &str,
    kind: &str,
    severity: u8,
    seed: u32,
    view: usize,
    views: usize,
    res: usize,
    mode: &str,
) -> Result<Vec<u8>, JsValue> {
    render_rgba(shape, kind, severity, seed as u64, view, views, res, mode).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn score(shape: &str, kind: &str, severity: u8, seed: u32, noise: f64) -> Result<String, JsValue> {
    score_noisy(shape, kind, severity, seed as u64, noise).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn catalog() -> String {
    catalog_json()
}
