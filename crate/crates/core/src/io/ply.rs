//! ASCII and binary little-endian PLY ingestion.
//!
//! Only scalar properties are supported. Coordinates go through `f32` so that
//! ASCII and binary encodings of the same data load identically.

use std::fs;
use std::path::Path;

use super::{check_label, Ingested, IoError};
use crate::cloud::LabeledCloud;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Format {
    Ascii,
    BinaryLe,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum ScalarType {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl ScalarType {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => ScalarType::I8,
            "uchar" | "uint8" => ScalarType::U8,
            "short" | "int16" => ScalarType::I16,
            "ushort" | "uint16" => ScalarType::U16,
            "int" | "int32" => ScalarType::I32,
            "uint" | "uint32" => ScalarType::U32,
            "float" | "float32" => ScalarType::F32,
            "double" | "float64" => ScalarType::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            ScalarType::I8 | ScalarType::U8 => 1,
            ScalarType::I16 | ScalarType::U16 => 2,
            ScalarType::I32 | ScalarType::U32 | ScalarType::F32 => 4,
            ScalarType::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            ScalarType::I8 => b[0] as i8 as f64,
            ScalarType::U8 => b[0] as f64,
            ScalarType::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            ScalarType::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            ScalarType::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            ScalarType::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            ScalarType::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            ScalarType::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }

    fn parse_ascii(self, tok: &str) -> Option<f64> {
        match self {
            ScalarType::F32 => tok.parse::<f32>().ok().map(f64::from),
            ScalarType::F64 => tok.parse::<f64>().ok(),
            _ => tok.parse::<i64>().ok().map(|v| v as f64),
        }
    }
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    props: Vec<(String, ScalarType)>,
}

impl Element {
    fn stride(&self) -> usize {
        self.props.iter().map(|(_, t)| t.size()).sum()
    }
}

fn parse_header(bytes: &[u8]) -> Result<(Format, Vec<Element>, usize), IoError> {
    let malformed = |m: &str| IoError::MalformedPly(m.to_string());
    let mut pos = 0;
    let mut lines = Vec::new();
    loop {
        let rest = &bytes[pos..];
        let nl = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| malformed("header not terminated by end_header"))?;
        let line = std::str::from_utf8(&rest[..nl])
            .map_err(|_| malformed("header is not UTF-8"))?
            .trim_end_matches('\r')
            .trim()
            .to_string();
        pos += nl + 1;
        let done = line == "end_header";
        lines.push(line);
        if done {
            break;
        }
    }
    if lines.first().map(String::as_str) != Some("ply") {
        return Err(malformed("missing 'ply' signature"));
    }
    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    for line in &lines[1..lines.len() - 1] {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["comment", ..] | ["obj_info", ..] => {}
            ["format", f, _version] => {
                format = Some(match *f {
                    "ascii" => Format::Ascii,
                    "binary_little_endian" => Format::BinaryLe,
                    "binary_big_endian" => {
                        return Err(IoError::UnsupportedPly("big-endian encoding".into()))
                    }
                    other => return Err(malformed(&format!("unknown format {other}"))),
                });
            }
            ["element", name, count] => elements.push(Element {
                name: name.to_string(),
                count: count
                    .parse()
                    .map_err(|_| malformed(&format!("bad element count {count}")))?,
                props: Vec::new(),
            }),
            ["property", "list", ..] => {
                return Err(IoError::UnsupportedPly("list properties".into()));
            }
            ["property", ty, name] => {
                let ty = ScalarType::parse(ty)
                    .ok_or_else(|| malformed(&format!("unknown property type {ty}")))?;
                elements
                    .last_mut()
                    .ok_or_else(|| malformed("property before any element"))?
                    .props
                    .push((name.to_string(), ty));
            }
            _ => return Err(malformed(&format!("unrecognized header line {line:?}"))),
        }
    }
    let format = format.ok_or_else(|| malformed("missing format line"))?;
    Ok((format, elements, pos))
}

/// Reads the `vertex` element's `x`, `y`, `z` and optional `label_name`
/// property. Missing labels default to 0 with a warning.
pub fn ingest_ply(path: &Path, label_name: &str) -> Result<Ingested, IoError> {
    let bytes = fs::read(path).map_err(|e| IoError::at(path, e))?;
    parse_ply(&bytes, label_name)
}

pub(crate) fn parse_ply(bytes: &[u8], label_name: &str) -> Result<Ingested, IoError> {
    let (format, elements, body_start) = parse_header(bytes)?;
    let vi = elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| IoError::MalformedPly("no vertex element".into()))?;
    let vertex = &elements[vi];
    let find = |n: &str| vertex.props.iter().position(|(p, _)| p == n);
    let xyz = [find("x"), find("y"), find("z")];
    let [Some(ix), Some(iy), Some(iz)] = xyz else {
        return Err(IoError::MissingColumn("x/y/z".into()));
    };
    let il = find(label_name);
    let mut warnings = Vec::new();
    if il.is_none() {
        warnings.push(format!(
            "no {label_name:?} vertex property; labels default to 0"
        ));
    }

    let rows: Vec<Vec<f64>> = match format {
        Format::Ascii => {
            let body = std::str::from_utf8(&bytes[body_start..])
                .map_err(|_| IoError::MalformedPly("ASCII body is not UTF-8".into()))?;
            let mut lines = body.lines().filter(|l| !l.trim().is_empty());
            // Skip elements stored before the vertices.
            for e in &elements[..vi] {
                for _ in 0..e.count {
                    lines.next();
                }
            }
            let mut rows = Vec::with_capacity(vertex.count);
            for r in 0..vertex.count {
                let line = lines.next().ok_or(IoError::Truncated {
                    expected: vertex.count,
                    actual: r,
                })?;
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() < vertex.props.len() {
                    return Err(IoError::MalformedPly(format!("vertex {r}: too few values")));
                }
                let row = vertex
                    .props
                    .iter()
                    .zip(&toks)
                    .map(|((_, ty), tok)| {
                        ty.parse_ascii(tok)
                            .ok_or_else(|| IoError::MalformedPly(format!("vertex {r}: bad value {tok:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(row);
            }
            rows
        }
        Format::BinaryLe => {
            let mut off = body_start;
            for e in &elements[..vi] {
                off += e.count * e.stride();
            }
            let stride = vertex.stride();
            let need = off + vertex.count * stride;
            if bytes.len() < need {
                return Err(IoError::Truncated {
                    expected: need,
                    actual: bytes.len(),
                });
            }
            (0..vertex.count)
                .map(|r| {
                    let mut at = off + r * stride;
                    vertex
                        .props
                        .iter()
                        .map(|(_, ty)| {
                            let v = ty.read_le(&bytes[at..]);
                            at += ty.size();
                            v
                        })
                        .collect()
                })
                .collect()
        }
    };

    let mut points = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        points.push([
            row[ix] as f32 as f64,
            row[iy] as f32 as f64,
            row[iz] as f32 as f64,
        ]);
        let l = il.map(|j| row[j] as f32 as f64).unwrap_or(0.0);
        labels.push(check_label(i, l)?);
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(Ingested {
        cloud: LabeledCloud::new(points, labels),
        warnings,
    })
}
