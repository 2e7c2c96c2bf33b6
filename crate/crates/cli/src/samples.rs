//! Inputs that may be either a sample manifest or a benchmark index.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use splatbench::corrupt::IndexRecord;
use splatbench::io::read_jsonl;
use splatbench::{CorruptionKind, SampleManifest, SeverityLevel};

#[derive(Clone, Debug)]
pub struct Sample {
    pub sample_id: u64,
    pub category: String,
    pub affordance: String,
    /// Resolved against the input file's directory.
    pub cloud_path: PathBuf,
    pub variant: Option<(CorruptionKind, SeverityLevel)>,
    pub prediction_path: Option<String>,
}

impl Sample {
    /// `<id>` for clean samples, `<id>/<kind>_s<severity>` for variants.
    pub fn relative_stem(&self) -> PathBuf {
        match self.variant {
            None => PathBuf::from(self.sample_id.to_string()),
            Some((k, s)) => Path::new(&self.sample_id.to_string()).join(format!("{}_s{}", k.name(), s.level())),
        }
    }
}

fn resolve(dir: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        dir.join(path)
    }
}

/// Loads JSON lines; a line with a `kind` field is an index record, any
/// other line a sample manifest.
pub fn load_samples(path: &Path) -> Result<Vec<Sample>> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    for (line, value) in read_jsonl::<serde_json::Value>(path)? {
        let at = |e: &dyn std::fmt::Display| anyhow!("{}:{line}: {e}", path.display());
        if value.get("kind").is_some() {
            let r: IndexRecord = serde_json::from_value(value).map_err(|e| at(&e))?;
            out.push(Sample {
                sample_id: r.sample_id,
                category: r.object_category,
                affordance: r.affordance_type,
                cloud_path: resolve(dir, &r.cloud_path),
                variant: Some((r.kind, r.severity)),
                prediction_path: None,
            });
        } else {
            let m: SampleManifest = serde_json::from_value(value).map_err(|e| at(&e))?;
            let m = m.canonicalize().map_err(|e| at(&e))?;
            out.push(Sample {
                sample_id: m.sample_id,
                category: m.object_category,
                affordance: m.affordance_type,
                cloud_path: resolve(dir, &m.cloud_path),
                variant: None,
                prediction_path: m.prediction_path,
            });
        }
    }
    Ok(out)
}
