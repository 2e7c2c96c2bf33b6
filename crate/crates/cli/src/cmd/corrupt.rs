use std::path::PathBuf;

use anyhow::{Context, Result};
use splatbench::corrupt::{build_benchmark, BenchmarkOptions};
use splatbench::io::load_manifest;

use super::{parse_kinds, parse_severities};
use crate::config::Layers;
use crate::Outcome;

#[derive(clap::Args)]
pub struct Args {
    /// Sample manifest (JSON lines).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated kinds or `all`.
    #[arg(long)]
    kinds: Option<String>,
    /// Comma-separated levels 1..=5 or `all`.
    #[arg(long)]
    severities: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

pub fn run(args: Args, layers: &Layers) -> Result<Outcome> {
    let options = BenchmarkOptions {
        master_seed: layers.resolve("seed", args.seed, 0)?,
        kinds: parse_kinds(&layers.resolve_string("kinds", args.kinds, "all"))?,
        severities: parse_severities(&layers.resolve_string("severities", args.severities, "all"))?,
    };
    let manifests = load_manifest(&args.input)?;
    let dir = args.input.parent().map(PathBuf::from).unwrap_or_default();
    let summary = build_benchmark(&manifests, &dir, &args.out, &options)
        .with_context(|| format!("writing benchmark to {}", args.out.display()))?;
    let mut text = format!(
        "{} base pairings, {} variants per pairing\n{} variants written\n",
        summary.base_pairings, summary.variants_per_pairing, summary.variants_written
    );
    for s in &summary.skipped {
        let what = match (s.kind, s.severity) {
            (Some(k), Some(v)) => format!("{} severity {}", k.name(), v.level()),
            _ => "all variants".to_string(),
        };
        text += &format!("skipped sample {} ({what}): {}\n", s.sample_id, s.reason);
    }
    Ok(Outcome {
        partial: !summary.skipped.is_empty(),
        text,
        json: serde_json::to_value(&summary)?,
    })
}
