use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::json;
use splatbench::io::{write_cloud, write_manifest, write_prediction, PredictionMeta};
use splatbench::rng::derive_stream;
use splatbench::synthetic::{generate, Shape};
use splatbench::SampleManifest;

use crate::config::Layers;
use crate::Outcome;

#[derive(clap::Args)]
pub struct Args {
    /// Output directory; receives `manifest.jsonl` and `clouds/`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    count: u64,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write predictions under `pred/`: labels plus Gaussian noise of
    /// this standard deviation, clamped to [0, 1].
    #[arg(long)]
    prediction_noise: Option<f64>,
}

pub fn run(args: Args, layers: &Layers) -> Result<Outcome> {
    let points: usize = layers.resolve("points", args.points, 2048)?;
    let seed: u64 = layers.resolve("seed", args.seed, 0)?;
    let clouds = args.out.join("clouds");
    fs::create_dir_all(&clouds).with_context(|| format!("creating {}", clouds.display()))?;
    if args.prediction_noise.is_some() {
        fs::create_dir_all(args.out.join("pred"))?;
    }
    let mut manifests = Vec::new();
    for id in 1..=args.count {
        let shape = Shape::ALL[(id as usize - 1) % Shape::ALL.len()];
        let cloud = generate(shape, points, seed.wrapping_add(id));
        let rel = format!("clouds/{id}.pcaf");
        write_cloud(&args.out.join(&rel), &cloud)?;
        let (category, affordance) = shape.pairing();
        manifests.push(SampleManifest::new(id, category, affordance, rel));
        if let Some(sigma) = args.prediction_noise {
            let mut s = derive_stream(seed, id, 0x9E_D1C7);
            let scores: Vec<f64> = cloud
                .labels
                .iter()
                .map(|&l| (l + sigma * s.normal()).clamp(0.0, 1.0))
                .collect();
            let meta = PredictionMeta {
                sample_id: id,
                model_name: format!("noisy-labels-{sigma}"),
            };
            write_prediction(&args.out.join(format!("pred/{id}.f32")), &scores, &meta)?;
        }
    }
    let manifest = args.out.join("manifest.jsonl");
    write_manifest(&manifest, &manifests)?;
    Ok(Outcome {
        partial: false,
        text: format!("{} samples written to {}\n", args.count, manifest.display()),
        json: json!({ "samples": args.count, "manifest": manifest }),
    })
}
