//! `splatbench`: corrupt, render, eval, report and selftest from the shell.
//!
//! Exit codes: 0 success, 1 fatal error, 2 finished with skipped items.

mod cmd;
mod config;
mod samples;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::Layers;

#[derive(Parser)]
#[command(name = "splatbench", version, about = "Corruption benchmarks, splat rendering and affordance metrics")]
struct Cli {
    /// Worker threads (0 = one per core). Never changes output bytes.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// `key = value` file consulted after flags and before SPLATBENCH_* variables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print a machine-readable summary to stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write procedural labeled clouds and a manifest for trying the pipeline.
    Synth(cmd::synth::Args),
    /// Generate corrupted variants of every sample in a manifest.
    Corrupt(cmd::corrupt::Args),
    /// Render samples to raw float views and PNGs.
    Render(cmd::render::Args),
    /// Score per-point predictions against ground-truth labels.
    Eval(cmd::eval::Args),
    /// Aggregate an evaluation CSV into a table.
    Report(cmd::report::Args),
    /// Run golden-vector and oracle checks.
    Selftest(cmd::selftest::Args),
}

/// What a command hands back to `main` for printing.
pub struct Outcome {
    pub partial: bool,
    pub text: String,
    pub json: serde_json::Value,
}

fn run(cli: Cli) -> Result<Outcome> {
    let layers = Layers::load(cli.config.as_deref())?;
    let threads: usize = layers.resolve("threads", cli.threads, 0)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("building worker pool")?;
    pool.install(|| match cli.command {
        Command::Synth(a) => cmd::synth::run(a, &layers),
        Command::Corrupt(a) => cmd::corrupt::run(a, &layers),
        Command::Render(a) => cmd::render::run(a, &layers),
        Command::Eval(a) => cmd::eval::run(a, &layers),
        Command::Report(a) => cmd::report::run(a, &layers),
        Command::Selftest(a) => cmd::selftest::run(a, &layers),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("json summary"));
            } else {
                print!("{}", out.text);
            }
            if out.partial {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
