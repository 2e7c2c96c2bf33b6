use std::path::Path;

use super::{read_jsonl, write_jsonl, IoError};
use crate::corrupt::IndexRecord;
use crate::manifest::SampleManifest;

/// Loads a JSON-lines sample manifest. Category and affordance names are
/// checked against the closed vocabularies and canonicalized.
pub fn load_manifest(path: &Path) -> Result<Vec<SampleManifest>, IoError> {
    read_jsonl::<SampleManifest>(path)?
        .into_iter()
        .map(|(line, m)| {
            m.canonicalize().map_err(|source| IoError::Manifest {
                path: path.to_path_buf(),
                line,
                source,
            })
        })
        .collect()
}

pub fn write_manifest(path: &Path, manifests: &[SampleManifest]) -> Result<(), IoError> {
    write_jsonl(path, manifests)
}

/// Loads a benchmark index written by the corruption pipeline.
pub fn load_index(path: &Path) -> Result<Vec<IndexRecord>, IoError> {
    Ok(read_jsonl::<IndexRecord>(path)?
        .into_iter()
        .map(|(_, r)| r)
        .collect())
}
