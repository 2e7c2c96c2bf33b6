//! On-disk formats: the `PCAF` cloud container, PLY/CSV ingestion,
//! JSON-lines manifests, prediction files, rendered-image dumps and reports.
//!
//! Binary data is little-endian and versioned; loaders refuse versions newer
//! than the one they were written for. Values are stored as `f32` and widened
//! to `f64` on load.

mod container;
mod image;
mod manifest;
mod ply;
mod prediction;
mod report;
mod table;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::manifest::ManifestError;

pub use container::{
    container_len, decode_cloud, encode_cloud, read_cloud, write_cloud, CONTAINER_MAGIC,
    CONTAINER_VERSION, FLAG_LABELS, HEADER_LEN,
};
pub use image::{
    encode_png_gray, encode_png_rgb, read_raw_view, write_png_gray, write_png_rgb, write_raw_view,
    RawViewMeta,
};
pub use manifest::{load_index, load_manifest, write_manifest};
pub use ply::ingest_ply;
pub use prediction::{read_prediction, write_prediction, Prediction, PredictionMeta};
pub use report::{
    format_aggregate_csv, read_eval_csv, render_markdown_table, write_aggregate_csv, write_eval_csv, EvalRow,
    REPORT_SCHEMA_VERSION,
};
pub use table::ingest_csv;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic {found:?}, expected \"PCAF\"")]
    BadMagic { found: [u8; 4] },
    #[error("container version {0} is newer than supported version 1")]
    UnsupportedVersion(u32),
    #[error("unsupported container flags {0:#x}")]
    UnsupportedFlags(u32),
    #[error("truncated data: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("{extra} trailing bytes after payload")]
    TrailingBytes { extra: usize },
    #[error("label out of range at index {index}: {value}")]
    LabelOutOfRange { index: usize, value: f64 },
    #[error("score out of range at index {index}: {value}")]
    ScoreOutOfRange { index: usize, value: f64 },
    #[error("length mismatch: expected {expected} values, found {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("unsupported PLY: {0}")]
    UnsupportedPly(String),
    #[error("malformed PLY: {0}")]
    MalformedPly(String),
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("{path}:{line}: {message}")]
    Json {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: {source}")]
    Manifest {
        path: PathBuf,
        line: usize,
        #[source]
        source: ManifestError,
    },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("png: {0}")]
    Png(String),
}

impl IoError {
    pub fn at(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Cloud plus anything worth telling the user about the conversion.
#[derive(Clone, Debug, PartialEq)]
pub struct Ingested {
    pub cloud: crate::cloud::LabeledCloud,
    pub warnings: Vec<String>,
}

/// Writes one JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), IoError> {
    let file = File::create(path).map_err(|e| IoError::at(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).expect("record serializes");
        writeln!(w, "{line}").map_err(|e| IoError::at(path, e))?;
    }
    w.flush().map_err(|e| IoError::at(path, e))
}

/// Reads JSON lines, skipping blank lines and `#` comments. Returns each
/// record with its 1-based line number.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>, IoError> {
    let file = File::open(path).map_err(|e| IoError::at(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| IoError::at(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value = serde_json::from_str(trimmed).map_err(|e| IoError::Json {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, value));
    }
    Ok(out)
}

pub(crate) fn check_label(index: usize, value: f64) -> Result<f64, IoError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(IoError::LabelOutOfRange { index, value })
    }
}
