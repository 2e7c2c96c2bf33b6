use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{DegenerateFlag, Metric, MetricReport};
use crate::corrupt::{CorruptionKind, SeverityLevel};
use crate::io::EvalRow;

/// Metric report of one (possibly corrupted) sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRecord {
    pub sample_id: u64,
    pub category: String,
    pub affordance: String,
    /// `None` for the clean cloud.
    pub corruption: Option<CorruptionKind>,
    pub severity: Option<SeverityLevel>,
    pub report: MetricReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKey {
    Category,
    Affordance,
    Corruption,
    Severity,
}

impl GroupKey {
    pub fn name(self) -> &'static str {
        match self {
            GroupKey::Category => "category",
            GroupKey::Affordance => "affordance",
            GroupKey::Corruption => "corruption",
            GroupKey::Severity => "severity",
        }
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "category" => Ok(GroupKey::Category),
            "affordance" => Ok(GroupKey::Affordance),
            "corruption" | "kind" => Ok(GroupKey::Corruption),
            "severity" => Ok(GroupKey::Severity),
            other => Err(format!("unknown group key {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum KeyPart {
    Text(String),
    Kind(Option<CorruptionKind>),
    Severity(Option<SeverityLevel>),
}

impl KeyPart {
    fn render(&self) -> String {
        match self {
            KeyPart::Text(s) => s.clone(),
            KeyPart::Kind(None) => "clean".to_string(),
            KeyPart::Kind(Some(k)) => k.name().to_string(),
            KeyPart::Severity(None) => "0".to_string(),
            KeyPart::Severity(Some(s)) => s.level().to_string(),
        }
    }
}

/// Unweighted means for one group.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupRow {
    /// Rendered key values, in `group_by` order.
    pub key: Vec<String>,
    pub corruption: Option<Option<CorruptionKind>>,
    pub samples: usize,
    pub means: BTreeMap<Metric, Option<f64>>,
    /// Samples whose metric was flagged degenerate and left out of the mean.
    pub excluded: BTreeMap<Metric, usize>,
}

/// Groups by any subset of keys (an empty slice gives one overall row) and
/// averages each metric over the samples where it is defined.
///
/// Rows come out in key order: vocabulary strings alphabetically, the clean
/// cloud before the corruption kinds, severities ascending. Sums run in
/// `sample_id` order so the result is independent of input order.
pub fn aggregate(records: &[EvalRecord], group_by: &[GroupKey]) -> Vec<GroupRow> {
    let mut sorted: Vec<&EvalRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (a.sample_id, a.corruption, a.severity).cmp(&(b.sample_id, b.corruption, b.severity))
    });
    #[derive(Default)]
    struct Acc {
        samples: usize,
        sums: BTreeMap<Metric, (f64, usize)>,
        excluded: BTreeMap<Metric, usize>,
    }
    let mut groups: BTreeMap<Vec<KeyPart>, Acc> = BTreeMap::new();
    for r in sorted {
        let key: Vec<KeyPart> = group_by
            .iter()
            .map(|k| match k {
                GroupKey::Category => KeyPart::Text(r.category.clone()),
                GroupKey::Affordance => KeyPart::Text(r.affordance.clone()),
                GroupKey::Corruption => KeyPart::Kind(r.corruption),
                GroupKey::Severity => KeyPart::Severity(r.severity),
            })
            .collect();
        let acc = groups.entry(key).or_default();
        acc.samples += 1;
        for m in Metric::ALL {
            match r.report.get(m) {
                Some(v) => {
                    let e = acc.sums.entry(m).or_insert((0.0, 0));
                    e.0 += v;
                    e.1 += 1;
                }
                None => {
                    if r.report.flag(m).is_some() {
                        *acc.excluded.entry(m).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    let kind_pos = group_by.iter().position(|k| *k == GroupKey::Corruption);
    groups
        .into_iter()
        .map(|(key, acc)| {
            let corruption = kind_pos.map(|i| match &key[i] {
                KeyPart::Kind(k) => *k,
                _ => unreachable!(),
            });
            let means = Metric::ALL
                .iter()
                .map(|&m| {
                    let mean = acc
                        .sums
                        .get(&m)
                        .filter(|(_, n)| *n > 0)
                        .map(|(s, n)| s / *n as f64);
                    (m, mean)
                })
                .collect();
            GroupRow {
                key: key.iter().map(KeyPart::render).collect(),
                corruption,
                samples: acc.samples,
                means,
                excluded: acc.excluded,
            }
        })
        .collect()
}

fn corruption_name(c: Option<CorruptionKind>) -> String {
    c.map(|k| k.name().to_string()).unwrap_or_else(|| "clean".to_string())
}

/// Long-format CSV rows for one record, one per requested metric.
pub fn rows_from_record(record: &EvalRecord, metrics: &[Metric]) -> Vec<EvalRow> {
    metrics
        .iter()
        .map(|&m| EvalRow {
            sample_id: record.sample_id,
            category: record.category.clone(),
            affordance: record.affordance.clone(),
            corruption: corruption_name(record.corruption),
            severity: record.severity.map(|s| s.level()).unwrap_or(0),
            metric: m.name().to_string(),
            value: record.report.get(m),
            flag: record.report.flag(m).unwrap_or("").to_string(),
        })
        .collect()
}

/// Reassembles records from long-format rows.
pub fn records_from_rows(rows: &[EvalRow]) -> Result<Vec<EvalRecord>, String> {
    let mut by_key: BTreeMap<(u64, Option<CorruptionKind>, Option<SeverityLevel>), EvalRecord> =
        BTreeMap::new();
    for row in rows {
        let corruption = if row.corruption == "clean" {
            None
        } else {
            Some(row.corruption.parse::<CorruptionKind>().map_err(|e| e.to_string())?)
        };
        let severity = match row.severity {
            0 => None,
            s => Some(SeverityLevel::new(s).ok_or_else(|| format!("bad severity {s}"))?),
        };
        let metric: Metric = row.metric.parse()?;
        let rec = by_key
            .entry((row.sample_id, corruption, severity))
            .or_insert_with(|| EvalRecord {
                sample_id: row.sample_id,
                category: row.category.clone(),
                affordance: row.affordance.clone(),
                corruption,
                severity,
                report: MetricReport::default(),
            });
        rec.report.set(metric, row.value);
        if !row.flag.is_empty() {
            rec.report.flags.push(DegenerateFlag {
                metric,
                reason: row.flag.clone(),
            });
        }
    }
    Ok(by_key.into_values().collect())
}
