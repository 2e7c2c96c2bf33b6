//! CSV point ingestion.

use std::path::Path;

use super::{check_label, Ingested, IoError};
use crate::cloud::LabeledCloud;

/// Reads a headered CSV with `x`, `y`, `z` columns (case-insensitive) and an
/// optional label column. A missing label column yields zero labels and a
/// warning.
pub fn ingest_csv(path: &Path, label_column: &str) -> Result<Ingested, IoError> {
    let reader = csv::Reader::from_path(path).map_err(|e| IoError::Csv(e.to_string()))?;
    read_csv(reader, label_column)
}

pub(crate) fn read_csv<R: std::io::Read>(
    mut reader: csv::Reader<R>,
    label_column: &str,
) -> Result<Ingested, IoError> {
    let headers = reader
        .headers()
        .map_err(|e| IoError::Csv(e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
    };
    let find = |name: &str| col(name).ok_or_else(|| IoError::MissingColumn(name.to_string()));
    let (ix, iy, iz) = (find("x")?, find("y")?, find("z")?);
    let il = col(label_column);
    let mut warnings = Vec::new();
    if il.is_none() {
        warnings.push(format!("no {label_column:?} column; labels default to 0"));
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IoError::Csv(e.to_string()))?;
        let num = |j: usize| -> Result<f64, IoError> {
            let field = record.get(j).unwrap_or("").trim();
            field
                .parse::<f32>()
                .map(f64::from)
                .map_err(|_| IoError::Csv(format!("row {}: bad number {field:?}", i + 1)))
        };
        points.push([num(ix)?, num(iy)?, num(iz)?]);
        labels.push(match il {
            Some(j) => check_label(i, num(j)?)?,
            None => 0.0,
        });
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(Ingested {
        cloud: LabeledCloud::new(points, labels),
        warnings,
    })
}
