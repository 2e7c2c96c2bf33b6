use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use serde_json::json;
use splatbench::io::{format_aggregate_csv, read_eval_csv, render_markdown_table};
use splatbench::metrics::{aggregate, records_from_rows, GroupKey};

use super::parse_list;
use crate::config::Layers;
use crate::Outcome;

#[derive(clap::Args)]
pub struct Args {
    /// Per-sample CSV written by `eval`.
    #[arg(long)]
    eval: PathBuf,
    /// `md` or `csv`.
    #[arg(long)]
    format: Option<String>,
    /// Comma-separated keys among category, affordance, corruption, severity.
    #[arg(long)]
    group_by: Option<String>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args, layers: &Layers) -> Result<Outcome> {
    let format = layers.resolve_string("format", args.format, "md");
    let group_by: Vec<GroupKey> =
        parse_list(&layers.resolve_string("group_by", args.group_by, "corruption"), &[])?;
    let rows = read_eval_csv(&args.eval)?;
    let records = records_from_rows(&rows).map_err(|e| anyhow!("{}: {e}", args.eval.display()))?;
    let groups = aggregate(&records, &group_by);
    let table = match format.as_str() {
        "md" | "markdown" => render_markdown_table(&groups, &group_by),
        "csv" => format_aggregate_csv(&groups, &group_by)?,
        other => bail!("unknown report format {other:?} (expected md or csv)"),
    };
    let text = match &args.out {
        Some(p) => {
            std::fs::write(p, &table)?;
            format!("{} groups written to {}\n", groups.len(), p.display())
        }
        None => table.clone(),
    };
    Ok(Outcome {
        partial: false,
        text,
        json: json!({ "groups": groups.len(), "format": format, "table": table }),
    })
}
