//! Run configuration: a `key = value` file, overridden field by field by
//! command-line flags.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::sampler::DEFAULT_SEED;
use crate::tree::Limits;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::Config(format!(
                "format must be json, csv or text, not {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub enum_depth: usize,
    pub count_depth: u64,
    pub window: usize,
    pub samples: u64,
    pub seed: u64,
    pub format: Format,
    pub cache: Option<PathBuf>,
    /// Worker threads; `None` means one per processor.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let limits = Limits::default();
        RunConfig {
            enum_depth: limits.enum_depth,
            count_depth: limits.count_depth,
            window: crate::measure::DEFAULT_WINDOW,
            samples: 100_000,
            seed: DEFAULT_SEED,
            format: Format::default(),
            cache: None,
            threads: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot read {value:?} as a number")))
}

impl RunConfig {
    pub const KEYS: [&'static str; 8] = [
        "enum_depth",
        "count_depth",
        "window",
        "samples",
        "seed",
        "format",
        "cache",
        "threads",
    ];

    /// Reads a configuration file on top of the defaults. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "enum_depth" => self.enum_depth = parse_num(key, value)?,
            "count_depth" => self.count_depth = parse_num(key, value)?,
            "window" => self.window = parse_num(key, value)?,
            "samples" => self.samples = parse_num(key, value)?,
            "seed" => self.seed = parse_seed(value)?,
            "format" => self.format = value.parse()?,
            "cache" => self.cache = Some(PathBuf::from(value)),
            "threads" => self.threads = Some(parse_num(key, value)?),
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("enum_depth", self.enum_depth as u64),
            ("count_depth", self.count_depth),
            ("window", self.window as u64),
            ("samples", self.samples),
            ("threads", self.threads.unwrap_or(1) as u64),
        ];
        for (key, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{key} must be positive")));
            }
        }
        Ok(())
    }

    pub fn limits(&self) -> Limits {
        Limits {
            enum_depth: self.enum_depth,
            count_depth: self.count_depth,
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Decimal, or hexadecimal with a `0x` prefix.
pub fn parse_seed(value: &str) -> Result<u64> {
    let bad = || Error::Config(format!("seed: cannot read {value:?}"));
    match value.strip_prefix("0x").or_else(|| value.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16).map_err(|_| bad()),
        None => value.replace('_', "").parse().map_err(|_| bad()),
    }
}
