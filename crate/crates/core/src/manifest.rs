//! Dataset sample records.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vocab;

/// Manifest schema understood by this crate.
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

fn default_schema() -> u32 {
    MANIFEST_SCHEMA_VERSION
}

/// One object-affordance pairing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleManifest {
    pub sample_id: u64,
    pub object_category: String,
    pub affordance_type: String,
    /// Cloud container path, relative to the manifest file unless absolute.
    pub cloud_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction_path: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub split: Vec<String>,
    #[serde(default = "default_schema")]
    pub schema: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ManifestError {
    #[error("sample {sample_id}: unknown object category {name:?}")]
    UnknownCategory { sample_id: u64, name: String },
    #[error("sample {sample_id}: unknown affordance type {name:?}")]
    UnknownAffordance { sample_id: u64, name: String },
    #[error("sample {sample_id}: schema version {found} is newer than supported {supported}")]
    SchemaMismatch {
        sample_id: u64,
        found: u32,
        supported: u32,
    },
}

impl SampleManifest {
    pub fn new(
        sample_id: u64,
        object_category: impl Into<String>,
        affordance_type: impl Into<String>,
        cloud_path: impl Into<String>,
    ) -> Self {
        Self {
            sample_id,
            object_category: object_category.into(),
            affordance_type: affordance_type.into(),
            cloud_path: cloud_path.into(),
            prediction_path: None,
            split: Vec::new(),
            schema: MANIFEST_SCHEMA_VERSION,
        }
    }

    /// Checks schema version and vocabularies, rewriting names to their
    /// canonical spelling.
    pub fn canonicalize(mut self) -> Result<Self, ManifestError> {
        if self.schema > MANIFEST_SCHEMA_VERSION {
            return Err(ManifestError::SchemaMismatch {
                sample_id: self.sample_id,
                found: self.schema,
                supported: MANIFEST_SCHEMA_VERSION,
            });
        }
        self.object_category = vocab::canonical_category(&self.object_category)
            .ok_or_else(|| ManifestError::UnknownCategory {
                sample_id: self.sample_id,
                name: self.object_category.clone(),
            })?
            .to_string();
        self.affordance_type = vocab::canonical_affordance(&self.affordance_type)
            .ok_or_else(|| ManifestError::UnknownAffordance {
                sample_id: self.sample_id,
                name: self.affordance_type.clone(),
            })?
            .to_string();
        Ok(self)
    }
}
