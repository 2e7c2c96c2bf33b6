//! `PCAF` point-cloud container.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "PCAF"
//! 4       4     version (u32 LE, = 1)
//! 8       4     n_points (u32 LE)
//! 12      4     flags (u32 LE, bit 0 = labels present)
//! 16      12n   x, y, z per point (f32 LE)
//! 16+12n  4n    labels (f32 LE), only when bit 0 is set
//! ```

use std::fs;
use std::path::Path;

use super::{check_label, IoError};
use crate::cloud::LabeledCloud;

pub const CONTAINER_MAGIC: [u8; 4] = *b"PCAF";
pub const CONTAINER_VERSION: u32 = 1;
pub const FLAG_LABELS: u32 = 1;
pub const HEADER_LEN: usize = 16;

/// Exact file length for `n` points.
pub fn container_len(n: usize, labels: bool) -> usize {
    HEADER_LEN + 12 * n + if labels { 4 * n } else { 0 }
}

/// Serializes with labels always present. Coordinates and labels are
/// narrowed to `f32`.
pub fn encode_cloud(cloud: &LabeledCloud) -> Vec<u8> {
    let n = cloud.n_points();
    let mut buf = Vec::with_capacity(container_len(n, true));
    buf.extend_from_slice(&CONTAINER_MAGIC);
    buf.extend_from_slice(&CONTAINER_VERSION.to_le_bytes());
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    buf.extend_from_slice(&FLAG_LABELS.to_le_bytes());
    for p in &cloud.points {
        for c in p {
            buf.extend_from_slice(&(*c as f32).to_le_bytes());
        }
    }
    for l in &cloud.labels {
        buf.extend_from_slice(&(*l as f32).to_le_bytes());
    }
    buf
}

fn u32_at(bytes: &[u8], off: usize) -> u32 {
    u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap())
}

fn f32_at(bytes: &[u8], off: usize) -> f64 {
    f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as f64
}

/// Parses a container. Returns the cloud and whether labels were stored;
/// label-less containers load with all labels 0.
pub fn decode_cloud(bytes: &[u8]) -> Result<(LabeledCloud, bool), IoError> {
    if bytes.len() >= 4 && bytes[..4] != CONTAINER_MAGIC {
        return Err(IoError::BadMagic {
            found: bytes[..4].try_into().unwrap(),
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(IoError::Truncated {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let version = u32_at(bytes, 4);
    if version > CONTAINER_VERSION || version == 0 {
        return Err(IoError::UnsupportedVersion(version));
    }
    let n = u32_at(bytes, 8) as usize;
    let flags = u32_at(bytes, 12);
    if flags & !FLAG_LABELS != 0 {
        return Err(IoError::UnsupportedFlags(flags));
    }
    let has_labels = flags & FLAG_LABELS != 0;
    let expected = container_len(n, has_labels);
    if bytes.len() < expected {
        return Err(IoError::Truncated {
            expected,
            actual: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(IoError::TrailingBytes {
            extra: bytes.len() - expected,
        });
    }
    let points = (0..n)
        .map(|i| {
            let off = HEADER_LEN + 12 * i;
            [f32_at(bytes, off), f32_at(bytes, off + 4), f32_at(bytes, off + 8)]
        })
        .collect();
    let labels = if has_labels {
        let base = HEADER_LEN + 12 * n;
        (0..n)
            .map(|i| check_label(i, f32_at(bytes, base + 4 * i)))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        vec![0.0; n]
    };
    Ok((LabeledCloud::new(points, labels), has_labels))
}

pub fn read_cloud(path: &Path) -> Result<LabeledCloud, IoError> {
    let bytes = fs::read(path).map_err(|e| IoError::at(path, e))?;
    decode_cloud(&bytes).map(|(c, _)| c)
}

pub fn write_cloud(path: &Path, cloud: &LabeledCloud) -> Result<(), IoError> {
    fs::write(path, encode_cloud(cloud)).map_err(|e| IoError::at(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn three() -> LabeledCloud {
        LabeledCloud::new(
            vec![[0.0, 1.0, 2.0], [-1.5, 0.25, 3.0], [0.1, 0.2, 0.3]],
            vec![0.0, 0.5, 1.0],
        )
    }

    #[test]
    fn three_point_file_is_64_bytes() {
        assert_eq!(encode_cloud(&three()).len(), 64);
        assert_eq!(container_len(3, true), 64);
    }

    #[test]
    fn truncated_payload() {
        let bytes = encode_cloud(&three());
        assert!(matches!(
            decode_cloud(&bytes[..60]),
            Err(IoError::Truncated { expected: 64, actual: 60 })
        ));
        assert!(matches!(decode_cloud(&bytes[..10]), Err(IoError::Truncated { .. })));
    }

    #[test]
    fn bad_magic_and_version() {
        let mut bytes = encode_cloud(&three());
        bytes[0] = b'X';
        assert!(matches!(decode_cloud(&bytes), Err(IoError::BadMagic { .. })));
        let mut bytes = encode_cloud(&three());
        bytes[4] = 2;
        assert!(matches!(decode_cloud(&bytes), Err(IoError::UnsupportedVersion(2))));
    }

    #[test]
    fn trailing_bytes_rejected() {
        let mut bytes = encode_cloud(&three());
        bytes.push(0);
        assert!(matches!(decode_cloud(&bytes), Err(IoError::TrailingBytes { extra: 1 })));
    }

    #[test]
    fn label_out_of_range_rejected() {
        let mut bytes = encode_cloud(&three());
        let off = 16 + 36 + 4;
        bytes[off..off + 4].copy_from_slice(&1.5f32.to_le_bytes());
        assert!(matches!(
            decode_cloud(&bytes),
            Err(IoError::LabelOutOfRange { index: 1, .. })
        ));
    }

    #[test]
    fn unlabeled_container_loads_zero_labels() {
        let mut bytes = encode_cloud(&three());
        bytes.truncate(16 + 36);
        bytes[12] = 0;
        let (cloud, has) = decode_cloud(&bytes).unwrap();
        assert!(!has);
        assert_eq!(cloud.labels, vec![0.0; 3]);
    }

    proptest! {
        #[test]
        fn decode_encode_is_bit_identity(
            pts in proptest::collection::vec((-1e6f32..1e6, -1e6f32..1e6, -1e6f32..1e6, 0.0f32..=1.0), 0..200)
        ) {
            let cloud = LabeledCloud::new(
                pts.iter().map(|&(x, y, z, _)| [x as f64, y as f64, z as f64]).collect(),
                pts.iter().map(|&(_, _, _, l)| l as f64).collect(),
            );
            let bytes = encode_cloud(&cloud);
            let (back, has) = decode_cloud(&bytes).unwrap();
            prop_assert!(has);
            prop_assert_eq!(encode_cloud(&back), bytes);
        }
    }
}
