use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{apply, CorruptionKind, CorruptionSpec, SeverityLevel};
use crate::cloud::LabeledCloud;
use crate::io::{self, IoError};
use crate::manifest::SampleManifest;
use crate::rng::{Lineage, RngStream};

pub const INDEX_FILE: &str = "index.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";
pub const BENCHMARK_SCHEMA_VERSION: u32 = 1;

/// Lineage of one corrupted variant. The tag is `16·kind_code + severity`, so
/// it is keyed by sample id rather than by position in the batch.
pub fn corruption_lineage(
    master_seed: u64,
    sample_id: u64,
    kind: CorruptionKind,
    severity: SeverityLevel,
) -> Lineage {
    Lineage::new(master_seed, sample_id, kind.code() * 16 + severity.level() as u64)
}

#[derive(Clone, Debug)]
pub struct BenchmarkOptions {
    pub master_seed: u64,
    pub kinds: Vec<CorruptionKind>,
    pub severities: Vec<SeverityLevel>,
}

impl BenchmarkOptions {
    /// All seven kinds at all five severities.
    pub fn full(master_seed: u64) -> Self {
        Self {
            master_seed,
            kinds: CorruptionKind::ALL.to_vec(),
            severities: SeverityLevel::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchmarkJob {
    pub sample_id: u64,
    pub kind: CorruptionKind,
    pub severity: SeverityLevel,
    pub lineage: Lineage,
}

impl BenchmarkJob {
    /// Output path relative to the benchmark root.
    pub fn relative_path(&self) -> String {
        format!(
            "clouds/{}/{}_s{}.pcaf",
            self.sample_id,
            self.kind.name(),
            self.severity.level()
        )
    }
}

/// One line of the benchmark index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub sample_id: u64,
    pub object_category: String,
    pub affordance_type: String,
    pub kind: CorruptionKind,
    pub severity: SeverityLevel,
    pub cloud_path: String,
    pub lineage: [u64; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedJob {
    pub sample_id: u64,
    pub kind: Option<CorruptionKind>,
    pub severity: Option<SeverityLevel>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkSummary {
    pub schema_version: u32,
    pub master_seed: u64,
    /// Distinct object-affordance pairings in the input.
    pub base_pairings: usize,
    pub pairings_per_category: BTreeMap<String, usize>,
    pub kinds: Vec<CorruptionKind>,
    pub severities: Vec<SeverityLevel>,
    pub variants_per_pairing: usize,
    pub variants_planned: usize,
    pub variants_written: usize,
    pub skipped: Vec<SkippedJob>,
}

#[derive(Clone, Debug)]
pub struct BenchmarkPlan {
    /// Samples sorted by id, duplicates removed.
    pub samples: Vec<SampleManifest>,
    pub jobs: Vec<BenchmarkJob>,
    pub summary: BenchmarkSummary,
}

/// Enumerates every variant without touching the filesystem.
///
/// Samples are ordered by id; a repeated id is skipped (its outputs would
/// collide) and reported in the summary.
pub fn plan_benchmark(manifests: &[SampleManifest], options: &BenchmarkOptions) -> BenchmarkPlan {
    let mut sorted: Vec<&SampleManifest> = manifests.iter().collect();
    sorted.sort_by_key(|m| m.sample_id);
    let mut samples: Vec<SampleManifest> = Vec::with_capacity(sorted.len());
    let mut skipped = Vec::new();
    for m in sorted {
        if samples.last().is_some_and(|prev| prev.sample_id == m.sample_id) {
            skipped.push(SkippedJob {
                sample_id: m.sample_id,
                kind: None,
                severity: None,
                reason: "duplicate sample_id".to_string(),
            });
        } else {
            samples.push(m.clone());
        }
    }
    let mut per_category = BTreeMap::new();
    let mut jobs = Vec::with_capacity(samples.len() * options.kinds.len() * options.severities.len());
    for m in &samples {
        *per_category.entry(m.object_category.clone()).or_insert(0) += 1;
        for &kind in &options.kinds {
            for &severity in &options.severities {
                jobs.push(BenchmarkJob {
                    sample_id: m.sample_id,
                    kind,
                    severity,
                    lineage: corruption_lineage(options.master_seed, m.sample_id, kind, severity),
                });
            }
        }
    }
    let summary = BenchmarkSummary {
        schema_version: BENCHMARK_SCHEMA_VERSION,
        master_seed: options.master_seed,
        base_pairings: samples.len(),
        pairings_per_category: per_category,
        kinds: options.kinds.clone(),
        severities: options.severities.clone(),
        variants_per_pairing: options.kinds.len() * options.severities.len(),
        variants_planned: jobs.len(),
        variants_written: 0,
        skipped,
    };
    BenchmarkPlan {
        samples,
        jobs,
        summary,
    }
}

enum JobOutcome {
    Written(IndexRecord),
    Skipped(SkippedJob),
}

/// Generates every variant under `out_dir` and writes the index and summary.
///
/// Cloud paths in `manifests` are resolved against `manifest_dir`. Failures
/// of single samples or variants go to the summary's skip list; only errors
/// writing the output tree abort.
pub fn build_benchmark(
    manifests: &[SampleManifest],
    manifest_dir: &Path,
    out_dir: &Path,
    options: &BenchmarkOptions,
) -> Result<BenchmarkSummary, IoError> {
    let plan = plan_benchmark(manifests, options);
    fs::create_dir_all(out_dir).map_err(|e| IoError::at(out_dir, e))?;

    let per_sample: Vec<Vec<JobOutcome>> = plan
        .samples
        .par_iter()
        .map(|m| run_sample(m, manifest_dir, out_dir, options))
        .collect::<Result<_, _>>()?;

    let mut summary = plan.summary;
    let mut records = Vec::new();
    for outcome in per_sample.into_iter().flatten() {
        match outcome {
            JobOutcome::Written(r) => records.push(r),
            JobOutcome::Skipped(s) => summary.skipped.push(s),
        }
    }
    summary.variants_written = records.len();

    let index_path = out_dir.join(INDEX_FILE);
    io::write_jsonl(&index_path, &records)?;
    let summary_path = out_dir.join(SUMMARY_FILE);
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&summary_path, text + "\n").map_err(|e| IoError::at(&summary_path, e))?;
    Ok(summary)
}

fn resolve(dir: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        dir.join(path)
    }
}

fn run_sample(
    m: &SampleManifest,
    manifest_dir: &Path,
    out_dir: &Path,
    options: &BenchmarkOptions,
) -> Result<Vec<JobOutcome>, IoError> {
    let cloud: LabeledCloud = match io::read_cloud(&resolve(manifest_dir, &m.cloud_path)) {
        Ok(c) => c,
        Err(e) => {
            return Ok(vec![JobOutcome::Skipped(SkippedJob {
                sample_id: m.sample_id,
                kind: None,
                severity: None,
                reason: e.to_string(),
            })])
        }
    };
    let mut outcomes = Vec::new();
    for &kind in &options.kinds {
        for &severity in &options.severities {
            let lineage = corruption_lineage(options.master_seed, m.sample_id, kind, severity);
            let job = BenchmarkJob {
                sample_id: m.sample_id,
                kind,
                severity,
                lineage,
            };
            let spec = CorruptionSpec::new(kind, severity, RngStream::new(lineage));
            match apply(&cloud, &spec) {
                Ok(corrupted) => {
                    let rel = job.relative_path();
                    let path = out_dir.join(&rel);
                    if let Some(parent) = path.parent() {
                        fs::create_dir_all(parent).map_err(|e| IoError::at(parent, e))?;
                    }
                    io::write_cloud(&path, &corrupted)?;
                    outcomes.push(JobOutcome::Written(IndexRecord {
                        sample_id: m.sample_id,
                        object_category: m.object_category.clone(),
                        affordance_type: m.affordance_type.clone(),
                        kind,
                        severity,
                        cloud_path: rel,
                        lineage: lineage.as_array(),
                    }));
                }
                Err(e) => outcomes.push(JobOutcome::Skipped(SkippedJob {
                    sample_id: m.sample_id,
                    kind: Some(kind),
                    severity: Some(severity),
                    reason: e.to_string(),
                })),
            }
        }
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifests(n: u64) -> Vec<SampleManifest> {
        (0..n)
            .map(|i| SampleManifest::new(i, "Mug", "grasp", format!("{i}.pcaf")))
            .collect()
    }

    #[test]
    fn plan_cardinality() {
        let plan = plan_benchmark(&manifests(10), &BenchmarkOptions::full(1));
        assert_eq!(plan.jobs.len(), 350);
        assert_eq!(plan.summary.variants_per_pairing, 35);
        assert_eq!(plan.summary.base_pairings, 10);
    }

    #[test]
    fn plan_is_order_independent() {
        let mut m = manifests(6);
        let a = plan_benchmark(&m, &BenchmarkOptions::full(3));
        m.reverse();
        let b = plan_benchmark(&m, &BenchmarkOptions::full(3));
        assert_eq!(a.jobs, b.jobs);
    }

    #[test]
    fn duplicate_ids_are_skipped() {
        let mut m = manifests(3);
        m.push(m[1].clone());
        let plan = plan_benchmark(&m, &BenchmarkOptions::full(3));
        assert_eq!(plan.summary.base_pairings, 3);
        assert_eq!(plan.summary.skipped.len(), 1);
    }

    #[test]
    fn lineage_tags_are_distinct() {
        let mut tags: Vec<u64> = Vec::new();
        for k in CorruptionKind::ALL {
            for s in SeverityLevel::ALL {
                tags.push(corruption_lineage(0, 0, k, s).corruption_tag);
            }
        }
        tags.sort_unstable();
        tags.dedup();
        assert_eq!(tags.len(), 35);
    }
}
