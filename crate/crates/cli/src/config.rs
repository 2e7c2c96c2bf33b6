//! Setting resolution: flag, then config file, then `SPLATBENCH_*`
//! environment variable, then the built-in default.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};

pub const ENV_PREFIX: &str = "SPLATBENCH_";

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// values may be wrapped in double quotes.
pub fn parse_config(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected key = value, got {raw:?}", i + 1))?;
        let v = v.trim();
        let v = v
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .unwrap_or(v);
        map.insert(normalize_key(k), v.to_string());
    }
    Ok(map)
}

pub struct Layers {
    file: HashMap<String, String>,
    env: HashMap<String, String>,
}

impl Layers {
    /// Reads the config file given by flag or by `SPLATBENCH_CONFIG`.
    pub fn load(config_flag: Option<&Path>) -> Result<Self> {
        Self::from_parts(config_flag, std::env::vars().collect())
    }

    pub fn from_parts(config_flag: Option<&Path>, env: HashMap<String, String>) -> Result<Self> {
        let env: HashMap<String, String> = env
            .into_iter()
            .filter_map(|(k, v)| k.strip_prefix(ENV_PREFIX).map(|s| (normalize_key(s), v)))
            .collect();
        let path = config_flag
            .map(Path::to_path_buf)
            .or_else(|| env.get("config").map(Into::into));
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p)
                    .with_context(|| format!("reading config file {}", p.display()))?;
                parse_config(&text).with_context(|| format!("in {}", p.display()))?
            }
            None => HashMap::new(),
        };
        Ok(Self { file, env })
    }

    /// The raw string for `key` from the file or environment layer.
    pub fn raw(&self, key: &str) -> Option<(&'static str, &str)> {
        let key = normalize_key(key);
        if let Some(v) = self.file.get(&key) {
            return Some(("config file", v.as_str()));
        }
        self.env.get(&key).map(|v| ("environment", v.as_str()))
    }

    pub fn resolve<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some((source, text)) => text
                .parse()
                .map_err(|e| anyhow!("{source} value for {key} ({text:?}): {e}")),
            None => Ok(default),
        }
    }

    pub fn resolve_string(&self, key: &str, flag: Option<String>, default: &str) -> String {
        flag.or_else(|| self.raw(key).map(|(_, v)| v.to_string()))
            .unwrap_or_else(|| default.to_string())
    }
}
