use anyhow::Result;
use splatbench::selftest::{run_selftest, SelftestOptions};
use splatbench::splat::RigConfig;

use crate::config::Layers;
use crate::Outcome;

#[derive(clap::Args)]
pub struct Args {
    /// Random scenes for the renderer cross-check.
    #[arg(long)]
    scenes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    views: Option<usize>,
    #[arg(long)]
    res: Option<usize>,
}

pub fn run(args: Args, layers: &Layers) -> Result<Outcome> {
    let defaults = SelftestOptions::default();
    let res: usize = layers.resolve("res", args.res, defaults.rig.width)?;
    let opts = SelftestOptions {
        seed: layers.resolve("seed", args.seed, defaults.seed)?,
        scenes: layers.resolve("scenes", args.scenes, defaults.scenes)?,
        rig: RigConfig {
            views: layers.resolve("views", args.views, defaults.rig.views)?,
            height: res,
            width: res,
            ..defaults.rig.clone()
        },
        ..defaults
    };
    let report = run_selftest(&opts);
    let mut text = String::new();
    for c in &report.checks {
        text += &format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if !report.passed() {
        anyhow::bail!("selftest failed\n{text}");
    }
    Ok(Outcome {
        partial: false,
        text,
        json: serde_json::to_value(&report)?,
    })
}
