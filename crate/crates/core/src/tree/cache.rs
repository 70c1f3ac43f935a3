//! Persistent count cache.
//!
//! One record per line: `hash depth count`, with the canonical expression
//! hash in hex and both numbers in decimal.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_bigint::BigUint;

use super::{count, Limits};
use crate::class::ClassExpr;
use crate::error::{Error, Result};

#[derive(Debug)]
pub struct CountCache {
    path: PathBuf,
    verify: bool,
    inner: Mutex<Inner>,
}

#[derive(Debug)]
struct Inner {
    entries: HashMap<(String, u64), BigUint>,
    file: File,
}

impl CountCache {
    /// Opens or creates the cache file. With `verify`, every hit is
    /// recomputed and a disagreement is an error.
    pub fn open(path: impl AsRef<Path>, verify: bool) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let (key, value) = parse_record(&line).ok_or_else(|| Error::CacheFormat {
                    line: i + 1,
                    text: line.clone(),
                })?;
                entries.insert(key, value);
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(CountCache {
            path,
            verify,
            inner: Mutex::new(Inner { entries, file }),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, e: &ClassExpr, depth: u64) -> Option<BigUint> {
        let inner = self.inner.lock().expect("cache lock");
        inner.entries.get(&(e.canonical_hash(), depth)).cloned()
    }

    /// `#T_P↾depth`, served from the cache when present.
    pub fn count(&self, e: &ClassExpr, depth: u64, limits: &Limits) -> Result<BigUint> {
        let hash = e.canonical_hash();
        if let Some(cached) = self.get(e, depth) {
            if self.verify {
                let fresh = count(e, depth, limits)?;
                if fresh != cached {
                    return Err(Error::CacheMismatch {
                        hash,
                        depth,
                        cached: cached.to_string(),
                        fresh: fresh.to_string(),
                    });
                }
            }
            return Ok(cached);
        }
        let fresh = count(e, depth, limits)?;
        let mut inner = self.inner.lock().expect("cache lock");
        if !inner.entries.contains_key(&(hash.clone(), depth)) {
            writeln!(inner.file, "{hash} {depth} {fresh}")?;
            inner.file.flush()?;
            inner.entries.insert((hash, depth), fresh.clone());
        }
        Ok(fresh)
    }
}

fn parse_record(line: &str) -> Option<((String, u64), BigUint)> {
    let mut parts = line.split_whitespace();
    let hash = parts.next()?.to_string();
    let depth = parts.next()?.parse().ok()?;
    let value = parts.next()?.parse().ok()?;
    parts.next().is_none().then_some(((hash, depth), value))
}
