pub mod corrupt;
pub mod eval;
pub mod render;
pub mod report;
pub mod selftest;
pub mod synth;

use std::str::FromStr;

use anyhow::{anyhow, Result};
use splatbench::{CorruptionKind, SeverityLevel};

/// Comma-separated list, or `all` for `everything`.
pub fn parse_list<T: FromStr + Clone>(text: &str, everything: &[T]) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    if text.trim().eq_ignore_ascii_case("all") {
        return Ok(everything.to_vec());
    }
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<T>().map_err(|e| anyhow!("{e}")))
        .collect()
}

pub fn parse_kinds(text: &str) -> Result<Vec<CorruptionKind>> {
    parse_list(text, &CorruptionKind::ALL)
}

pub fn parse_severities(text: &str) -> Result<Vec<SeverityLevel>> {
    let levels: Vec<u8> = parse_list(text, &[1, 2, 3, 4, 5])?;
    levels
        .into_iter()
        .map(|l| SeverityLevel::new(l).ok_or_else(|| anyhow!("severity must be 1..=5, got {l}")))
        .collect()
}
