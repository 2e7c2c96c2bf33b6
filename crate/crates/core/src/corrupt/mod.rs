//! The seven atomic point-cloud corruptions and benchmark generation.
//!
//! Severity 1 selects the mildest parameter of each list, severity 5 the
//! harshest. Every corruption draws from the [`RngStream`] carried by its
//! [`CorruptionSpec`]; applying the same spec twice gives bit-identical
//! output.

mod benchmark;
mod ops;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloud::{LabeledCloud, ValidationReport};
use crate::rng::{Lineage, RngStream};

pub use benchmark::{
    build_benchmark, corruption_lineage, plan_benchmark, BenchmarkJob, BenchmarkOptions,
    BenchmarkPlan, BenchmarkSummary, IndexRecord, SkippedJob, INDEX_FILE, SUMMARY_FILE,
};
pub use ops::{
    add_global, add_local, add_local_with_clusters, apply_euler_rotation, apply_scale_factors,
    drop_global, drop_local, drop_local_with_clusters, euler_rotation_matrix, jitter,
    jitter_with_sigma, partition_count, rotate, sample_euler_angles, sample_scale_factors, scale,
    unit_sphere_normalize, AddLocalTrace, ClusterTrace, DropLocalTrace, MAX_LOCAL_CLUSTERS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionKind {
    Jitter,
    Scale,
    Rotate,
    DropGlobal,
    DropLocal,
    AddGlobal,
    AddLocal,
}

impl CorruptionKind {
    pub const ALL: [CorruptionKind; 7] = [
        CorruptionKind::Jitter,
        CorruptionKind::Scale,
        CorruptionKind::Rotate,
        CorruptionKind::DropGlobal,
        CorruptionKind::DropLocal,
        CorruptionKind::AddGlobal,
        CorruptionKind::AddLocal,
    ];

    /// Row order of the published robustness tables.
    pub const TABLE_ORDER: [CorruptionKind; 7] = [
        CorruptionKind::Scale,
        CorruptionKind::Jitter,
        CorruptionKind::Rotate,
        CorruptionKind::DropLocal,
        CorruptionKind::DropGlobal,
        CorruptionKind::AddLocal,
        CorruptionKind::AddGlobal,
    ];

    /// 1-based code used in lineage tags.
    pub fn code(self) -> u64 {
        self as u64 + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            CorruptionKind::Jitter => "jitter",
            CorruptionKind::Scale => "scale",
            CorruptionKind::Rotate => "rotate",
            CorruptionKind::DropGlobal => "drop_global",
            CorruptionKind::DropLocal => "drop_local",
            CorruptionKind::AddGlobal => "add_global",
            CorruptionKind::AddLocal => "add_local",
        }
    }

    /// Short label used in report tables.
    pub fn table_label(self) -> &'static str {
        match self {
            CorruptionKind::Jitter => "Jitter",
            CorruptionKind::Scale => "Scale",
            CorruptionKind::Rotate => "Rotate",
            CorruptionKind::DropGlobal => "Drop-G",
            CorruptionKind::DropLocal => "Drop-L",
            CorruptionKind::AddGlobal => "Add-G",
            CorruptionKind::AddLocal => "Add-L",
        }
    }
}

impl fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown corruption kind {0:?}")]
pub struct UnknownKind(pub String);

impl FromStr for CorruptionKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let kind = match key.as_str() {
            "jitter" => CorruptionKind::Jitter,
            "scale" => CorruptionKind::Scale,
            "rotate" => CorruptionKind::Rotate,
            "drop_global" | "drop_g" => CorruptionKind::DropGlobal,
            "drop_local" | "drop_l" => CorruptionKind::DropLocal,
            "add_global" | "add_g" => CorruptionKind::AddGlobal,
            "add_local" | "add_l" => CorruptionKind::AddLocal,
            _ => return Err(UnknownKind(s.to_string())),
        };
        Ok(kind)
    }
}

/// Severity in `1..=5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct SeverityLevel(u8);

impl SeverityLevel {
    pub const ALL: [SeverityLevel; 5] = [
        SeverityLevel(1),
        SeverityLevel(2),
        SeverityLevel(3),
        SeverityLevel(4),
        SeverityLevel(5),
    ];

    pub fn new(level: u8) -> Option<Self> {
        (1..=5).contains(&level).then_some(SeverityLevel(level))
    }

    pub fn level(self) -> u8 {
        self.0
    }

    /// Zero-based index into the severity lists.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for SeverityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<u8> for SeverityLevel {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        SeverityLevel::new(v).ok_or_else(|| format!("severity {v} outside 1..=5"))
    }
}

impl From<SeverityLevel> for u8 {
    fn from(s: SeverityLevel) -> u8 {
        s.0
    }
}

/// Per-severity corruption parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SeverityTable {
    pub jitter_sigma: [f64; 5],
    pub scale_s: [f64; 5],
    pub rotate_theta: [f64; 5],
    pub drop_global_rho: [f64; 5],
    pub drop_local_k: [usize; 5],
    pub add_global_k: [usize; 5],
    pub add_local_k: [usize; 5],
}

pub const SEVERITY_TABLE: SeverityTable = SeverityTable {
    jitter_sigma: [0.01, 0.02, 0.03, 0.04, 0.05],
    scale_s: [1.6, 1.7, 1.8, 1.9, 2.0],
    rotate_theta: [
        std::f64::consts::PI / 30.0,
        std::f64::consts::PI / 15.0,
        std::f64::consts::PI / 10.0,
        std::f64::consts::PI / 7.5,
        std::f64::consts::PI / 6.0,
    ],
    drop_global_rho: [0.25, 0.375, 0.5, 0.675, 0.75],
    drop_local_k: [100, 200, 300, 400, 500],
    add_global_k: [10, 20, 30, 40, 50],
    add_local_k: [100, 200, 300, 400, 500],
};

/// Standard-deviation range of each Add Local cluster.
pub const ADD_LOCAL_SIGMA_RANGE: (f64, f64) = (0.075, 0.125);

/// One fully determined corrupted variant.
#[derive(Clone, Debug)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    pub severity: SeverityLevel,
    pub stream: RngStream,
}

impl CorruptionSpec {
    pub fn new(kind: CorruptionKind, severity: SeverityLevel, stream: RngStream) -> Self {
        Self {
            kind,
            severity,
            stream,
        }
    }

    /// Spec whose stream is derived from `(master_seed, sample_id)` and the
    /// kind/severity tag.
    pub fn for_sample(
        kind: CorruptionKind,
        severity: SeverityLevel,
        master_seed: u64,
        sample_id: u64,
    ) -> Self {
        let lineage = corruption_lineage(master_seed, sample_id, kind, severity);
        Self::new(kind, severity, RngStream::new(lineage))
    }

    pub fn lineage(&self) -> Lineage {
        self.stream.lineage()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CorruptError {
    #[error("spec is for {found}, operation expects {expected}")]
    WrongKind {
        expected: CorruptionKind,
        found: CorruptionKind,
    },
    #[error("invalid input cloud: {0}")]
    InvalidCloud(ValidationReport),
    #[error("cloud is empty")]
    EmptyCloud,
    #[error("all points coincide; cannot normalize")]
    DegenerateCloud,
    #[error("dropping {dropped} of {n} points leaves nothing")]
    EmptyResult { n: usize, dropped: usize },
    #[error("cloud of {n} points too small to drop {k} in local clusters (need more than {})", k + MAX_LOCAL_CLUSTERS)]
    CloudTooSmall { n: usize, k: usize },
}

/// Applies the corruption named by `spec.kind`.
pub fn apply(cloud: &LabeledCloud, spec: &CorruptionSpec) -> Result<LabeledCloud, CorruptError> {
    match spec.kind {
        CorruptionKind::Jitter => jitter(cloud, spec),
        CorruptionKind::Scale => scale(cloud, spec),
        CorruptionKind::Rotate => rotate(cloud, spec),
        CorruptionKind::DropGlobal => drop_global(cloud, spec),
        CorruptionKind::DropLocal => drop_local(cloud, spec),
        CorruptionKind::AddGlobal => add_global(cloud, spec),
        CorruptionKind::AddLocal => add_local(cloud, spec),
    }
}

/// `round(x)` with halves away from zero, as a count.
pub fn round_count(x: f64) -> usize {
    x.round() as usize
}

/// Expected output size for a kind/severity applied to `n` points.
pub fn expected_count(kind: CorruptionKind, severity: SeverityLevel, n: usize) -> usize {
    let i = severity.index();
    let t = &SEVERITY_TABLE;
    match kind {
        CorruptionKind::Jitter | CorruptionKind::Scale | CorruptionKind::Rotate => n,
        CorruptionKind::DropGlobal => n - round_count(n as f64 * t.drop_global_rho[i]).min(n),
        CorruptionKind::DropLocal => n.saturating_sub(t.drop_local_k[i]),
        CorruptionKind::AddGlobal => n + t.add_global_k[i],
        CorruptionKind::AddLocal => n + t.add_local_k[i],
    }
}
