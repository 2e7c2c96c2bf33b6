//! Rendered-view exports: raw `f32` planar dumps with a JSON sidecar, and
//! 8-bit PNGs for inspection.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::splat::ViewStack;

/// Sidecar of a raw view dump.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawViewMeta {
    pub view: usize,
    #[serde(rename = "H")]
    pub height: usize,
    #[serde(rename = "W")]
    pub width: usize,
    pub channels: usize,
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes view `view` of `stack` as `channels × H × W` little-endian `f32`
/// values and its sidecar next to it.
pub fn write_raw_view(path: &Path, stack: &ViewStack, view: usize) -> Result<RawViewMeta, IoError> {
    let values = stack.view(view);
    let mut buf = Vec::with_capacity(values.len() * 4);
    for v in values {
        buf.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    fs::write(path, buf).map_err(|e| IoError::at(path, e))?;
    let meta = RawViewMeta {
        view,
        height: stack.height,
        width: stack.width,
        channels: stack.channels,
    };
    let side = sidecar(path);
    let text = serde_json::to_string(&meta).expect("meta serializes");
    fs::write(&side, text + "\n").map_err(|e| IoError::at(&side, e))?;
    Ok(meta)
}

/// Reads a raw view dump back as a one-view stack.
pub fn read_raw_view(path: &Path) -> Result<(RawViewMeta, ViewStack), IoError> {
    let side = sidecar(path);
    let text = fs::read_to_string(&side).map_err(|e| IoError::at(&side, e))?;
    let meta: RawViewMeta = serde_json::from_str(&text).map_err(|e| IoError::Json {
        path: side.clone(),
        line: 1,
        message: e.to_string(),
    })?;
    let bytes = fs::read(path).map_err(|e| IoError::at(path, e))?;
    let n = meta.channels * meta.height * meta.width;
    if bytes.len() != n * 4 {
        return Err(IoError::Truncated {
            expected: n * 4,
            actual: bytes.len(),
        });
    }
    let mut stack = ViewStack::zeros(1, meta.channels, meta.height, meta.width);
    for (d, c) in stack.data.iter_mut().zip(bytes.chunks_exact(4)) {
        *d = f32::from_le_bytes(c.try_into().unwrap()) as f64;
    }
    Ok((meta, stack))
}

fn to_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn encode(width: usize, height: usize, color: png::ColorType, pixels: &[u8]) -> Result<Vec<u8>, IoError> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(color);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().map_err(|e| IoError::Png(e.to_string()))?;
        w.write_image_data(pixels).map_err(|e| IoError::Png(e.to_string()))?;
    }
    Ok(out)
}

/// 8-bit grayscale PNG of one `H × W` plane with values in `[0, 1]`.
pub fn encode_png_gray(width: usize, height: usize, plane: &[f64]) -> Result<Vec<u8>, IoError> {
    let px: Vec<u8> = plane.iter().map(|&v| to_u8(v)).collect();
    encode(width, height, png::ColorType::Grayscale, &px)
}

/// 8-bit RGB PNG of a planar `3 × H × W` image with values in `[0, 1]`.
pub fn encode_png_rgb(width: usize, height: usize, planar: &[f64]) -> Result<Vec<u8>, IoError> {
    let n = width * height;
    let mut px = Vec::with_capacity(3 * n);
    for p in 0..n {
        for c in 0..3 {
            px.push(to_u8(planar[c * n + p]));
        }
    }
    encode(width, height, png::ColorType::Rgb, &px)
}

pub fn write_png_gray(path: &Path, width: usize, height: usize, plane: &[f64]) -> Result<(), IoError> {
    let bytes = encode_png_gray(width, height, plane)?;
    fs::write(path, bytes).map_err(|e| IoError::at(path, e))
}

pub fn write_png_rgb(path: &Path, width: usize, height: usize, planar: &[f64]) -> Result<(), IoError> {
    let bytes = encode_png_rgb(width, height, planar)?;
    fs::write(path, bytes).map_err(|e| IoError::at(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_view_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = ViewStack::zeros(2, 2, 3, 4);
        for (i, d) in s.data.iter_mut().enumerate() {
            *d = i as f64 * 0.25;
        }
        let p = dir.path().join("view_1.f32");
        let meta = write_raw_view(&p, &s, 1).unwrap();
        assert_eq!(meta.channels, 2);
        let side = fs::read_to_string(dir.path().join("view_1.json")).unwrap();
        assert_eq!(side.trim(), r#"{"view":1,"H":3,"W":4,"channels":2}"#);
        let (_, back) = read_raw_view(&p).unwrap();
        assert_eq!(back.data, s.view(1));
    }

    #[test]
    fn png_decodes_to_same_size() {
        let bytes = encode_png_rgb(5, 2, &[0.5; 30]).unwrap();
        let dec = png::Decoder::new(std::io::Cursor::new(bytes));
        let reader = dec.read_info().unwrap();
        let info = reader.info();
        assert_eq!((info.width, info.height), (5, 2));
        assert!(encode_png_gray(3, 3, &[1.0; 9]).unwrap().starts_with(b"\x89PNG"));
    }
}
