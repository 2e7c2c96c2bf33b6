//! Prediction files: `n` little-endian `f32` scores plus a JSON sidecar with
//! the same stem (`<stem>.json`).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::IoError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionMeta {
    pub sample_id: u64,
    pub model_name: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub scores: Vec<f64>,
    pub meta: Option<PredictionMeta>,
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn write_prediction(path: &Path, scores: &[f64], meta: &PredictionMeta) -> Result<(), IoError> {
    let mut buf = Vec::with_capacity(scores.len() * 4);
    for s in scores {
        buf.extend_from_slice(&(*s as f32).to_le_bytes());
    }
    fs::write(path, buf).map_err(|e| IoError::at(path, e))?;
    let side = sidecar(path);
    let text = serde_json::to_string(meta).expect("meta serializes");
    fs::write(&side, text + "\n").map_err(|e| IoError::at(&side, e))
}

/// Reads scores, checking range and (when given) the expected count. The
/// sidecar is optional.
pub fn read_prediction(path: &Path, expected_len: Option<usize>) -> Result<Prediction, IoError> {
    let bytes = fs::read(path).map_err(|e| IoError::at(path, e))?;
    if bytes.len() % 4 != 0 {
        return Err(IoError::Truncated {
            expected: bytes.len().div_ceil(4) * 4,
            actual: bytes.len(),
        });
    }
    let scores: Vec<f64> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    if let Some(n) = expected_len {
        if n != scores.len() {
            return Err(IoError::LengthMismatch {
                expected: n,
                actual: scores.len(),
            });
        }
    }
    if let Some((index, &value)) = scores
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        return Err(IoError::ScoreOutOfRange { index, value });
    }
    let side = sidecar(path);
    let meta = match fs::read_to_string(&side) {
        Ok(text) => Some(serde_json::from_str(&text).map_err(|e| IoError::Json {
            path: side.clone(),
            line: 1,
            message: e.to_string(),
        })?),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(IoError::at(&side, e)),
    };
    Ok(Prediction { scores, meta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_checks() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("7.f32");
        let meta = PredictionMeta {
            sample_id: 7,
            model_name: "baseline".into(),
        };
        write_prediction(&p, &[0.0, 0.25, 1.0], &meta).unwrap();
        let pred = read_prediction(&p, Some(3)).unwrap();
        assert_eq!(pred.scores, vec![0.0, 0.25, 1.0]);
        assert_eq!(pred.meta, Some(meta));
        assert!(matches!(
            read_prediction(&p, Some(4)),
            Err(IoError::LengthMismatch { expected: 4, actual: 3 })
        ));
        fs::write(&p, 2.0f32.to_le_bytes()).unwrap();
        assert!(matches!(read_prediction(&p, None), Err(IoError::ScoreOutOfRange { .. })));
        fs::write(&p, [0u8; 5]).unwrap();
        assert!(matches!(read_prediction(&p, None), Err(IoError::Truncated { .. })));
    }
}
