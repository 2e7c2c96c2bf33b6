use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use splatbench::io::{read_cloud, write_png_gray, write_png_rgb, write_raw_view};
use splatbench::splat::{
    colormap_depth, init_gaussians, rasterize, rig_for_cloud, splat_features, ColorMode, DepthColormap,
    GaussianSet, RenderConfig, RigConfig,
};
use splatbench::LabeledCloud;

use crate::config::Layers;
use crate::samples::{load_samples, Sample};
use crate::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Depth,
    Affordance,
    Feature,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Mode as clap::ValueEnum>::from_str(s, true)
    }
}

#[derive(clap::Args)]
pub struct Args {
    /// Sample manifest or benchmark index (JSON lines).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    views: Option<usize>,
    /// Image height and width in pixels.
    #[arg(long)]
    res: Option<usize>,
    #[arg(long)]
    iso_scale: Option<f64>,
    #[arg(long)]
    opacity: Option<f64>,
    /// Camera distance in units of the cloud's bounding radius.
    #[arg(long)]
    radius_factor: Option<f64>,
    /// Comma-separated ring elevations in degrees.
    #[arg(long)]
    elevations: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Depth PNG colormap: turbo, grayscale or grayscale-inverse.
    #[arg(long)]
    colormap: Option<String>,
}

struct Settings {
    config: RenderConfig,
    mode: Mode,
    colormap: DepthColormap,
}

fn settings(args: &Args, layers: &Layers) -> Result<Settings> {
    let defaults = RenderConfig::default();
    let res: usize = layers.resolve("res", args.res, defaults.rig.width)?;
    let elevations = layers.resolve_string("elevations", args.elevations.clone(), "30,-30");
    let elevations_deg = elevations
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| anyhow!("elevation {s:?}: {e}")))
        .collect::<Result<Vec<_>>>()?;
    let config = RenderConfig {
        rig: RigConfig {
            views: layers.resolve("views", args.views, defaults.rig.views)?,
            height: res,
            width: res,
            radius_factor: layers.resolve("radius_factor", args.radius_factor, defaults.rig.radius_factor)?,
            elevations_deg,
        },
        iso_scale: layers.resolve("iso_scale", args.iso_scale, defaults.iso_scale)?,
        opacity: layers.resolve("opacity", args.opacity, defaults.opacity)?,
    };
    // Surface configuration errors before touching any sample.
    splatbench::splat::make_views([0.0; 3], 1.0, &config.rig)?;
    GaussianSet::new(vec![], vec![], 1, config.iso_scale, config.opacity)?;
    let colormap = layers
        .resolve_string("colormap", args.colormap.clone(), "turbo")
        .parse()
        .map_err(|e: String| anyhow!(e))?;
    Ok(Settings {
        config,
        mode: layers.resolve("mode", args.mode, Mode::Depth).map_err(|e| anyhow!("{e}"))?,
        colormap,
    })
}

fn render_one(sample: &Sample, cloud: &LabeledCloud, s: &Settings, dir: &Path) -> Result<usize> {
    fs::create_dir_all(dir)?;
    let rig = rig_for_cloud(cloud, &s.config.rig)?;
    let (h, w) = (rig.height, rig.width);
    let (iso, op) = (s.config.iso_scale, s.config.opacity);
    let views = rig.views();
    match s.mode {
        Mode::Affordance => {
            let masks = splatbench::splat::render_affordance_masks(cloud, &rig, iso, op)?;
            for v in 0..views {
                write_raw_view(&dir.join(format!("view_{v}.f32")), &masks, v)?;
                write_png_gray(&dir.join(format!("view_{v}.png")), w, h, masks.plane(v, 0))?;
            }
        }
        Mode::Depth => {
            let g = init_gaussians(cloud, iso, op, ColorMode::Affordance)?;
            let out = rasterize(&g, &rig);
            let images = colormap_depth(&out.depth, &out.alpha, s.colormap);
            for (v, empty) in images.all_invalid.iter().enumerate() {
                if *empty {
                    log::warn!("sample {}: view {v} has no covered pixel", sample.sample_id);
                }
            }
            for v in 0..views {
                write_raw_view(&dir.join(format!("view_{v}.f32")), &out.depth, v)?;
                write_raw_view(&dir.join(format!("alpha_{v}.f32")), &out.alpha, v)?;
                write_png_rgb(&dir.join(format!("view_{v}.png")), w, h, images.images.view(v))?;
            }
        }
        Mode::Feature => {
            let xyz: Vec<f64> = cloud.points.iter().flatten().copied().collect();
            let feats = splat_features(cloud, &xyz, 3, &rig, iso, op)?;
            for v in 0..views {
                write_raw_view(&dir.join(format!("view_{v}.f32")), &feats, v)?;
            }
        }
    }
    Ok(views)
}

pub fn run(args: Args, layers: &Layers) -> Result<Outcome> {
    let s = settings(&args, layers)?;
    let samples = load_samples(&args.input)?;
    if samples.is_empty() {
        bail!("{} lists no samples", args.input.display());
    }
    let results: Vec<Result<usize>> = samples
        .par_iter()
        .map(|sample| {
            let cloud = read_cloud(&sample.cloud_path)?;
            render_one(sample, &cloud, &s, &args.out.join(sample.relative_stem()))
        })
        .collect();
    let mut images = 0;
    let mut skipped = Vec::new();
    for (sample, r) in samples.iter().zip(results) {
        match r {
            Ok(n) => images += n,
            Err(e) => skipped.push(json!({
                "sample": sample.relative_stem(),
                "reason": format!("{e:#}"),
            })),
        }
    }
    let (h, w) = (s.config.rig.height, s.config.rig.width);
    let mut text = format!(
        "{} samples rendered, {images} images of {h}x{w} ({:?} mode)\n",
        samples.len() - skipped.len(),
        s.mode
    )
    .to_lowercase();
    for sk in &skipped {
        text += &format!("skipped {}: {}\n", sk["sample"].as_str().unwrap_or("?"), sk["reason"]);
    }
    Ok(Outcome {
        partial: !skipped.is_empty(),
        text,
        json: json!({
            "samples_rendered": samples.len() - skipped.len(),
            "images": images,
            "height": h,
            "width": w,
            "mode": s.mode,
            "config": s.config,
            "skipped": skipped,
        }),
    })
}
