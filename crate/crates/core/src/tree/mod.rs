//! Levels `T_P↾n` of the tree of extendible nodes: enumeration, exact
//! counting and extension counts.

mod cache;
mod count;
mod layers;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::class::{ClassExpr, RawTree};
use crate::error::{Error, Result};
use crate::word::Word;

pub use cache::CountCache;
pub use count::{count_from, counts_from};
pub use layers::{by_state, layers, Cell, Layer};

/// Largest depth whose words still pack into a `u64` code.
pub const MAX_ENUM_DEPTH: usize = 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Deepest level that may be materialised word by word.
    pub enum_depth: usize,
    /// Deepest level that may be counted.
    pub count_depth: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enum_depth: 24,
            count_depth: 1_000_000,
        }
    }
}

impl Limits {
    pub fn check_enum(&self, depth: usize) -> Result<()> {
        let limit = self.enum_depth.min(MAX_ENUM_DEPTH);
        if depth > limit {
            return Err(Error::DepthLimit {
                kind: "enumeration",
                requested: depth as u64,
                limit: limit as u64,
            });
        }
        Ok(())
    }

    pub fn check_count(&self, depth: u64) -> Result<()> {
        if depth > self.count_depth {
            return Err(Error::DepthLimit {
                kind: "counting",
                requested: depth,
                limit: self.count_depth,
            });
        }
        Ok(())
    }
}

/// The nodes of one depth, bit-packed in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    depth: usize,
    codes: Option<Vec<u64>>,
    cardinality: BigUint,
}

impl Level {
    fn materialized(depth: usize, codes: Vec<u64>) -> Self {
        let cardinality = BigUint::from(codes.len());
        Level {
            depth,
            codes: Some(codes),
            cardinality,
        }
    }

    /// A level known only by its size.
    pub fn counted(depth: usize, cardinality: BigUint) -> Self {
        Level {
            depth,
            codes: None,
            cardinality,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn cardinality(&self) -> &BigUint {
        &self.cardinality
    }

    pub fn is_materialized(&self) -> bool {
        self.codes.is_some()
    }

    pub fn len(&self) -> usize {
        self.codes.as_ref().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn codes(&self) -> &[u64] {
        self.codes.as_deref().unwrap_or(&[])
    }

    /// Words in lexicographic order; empty for counting-only levels.
    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        self.codes()
            .iter()
            .map(move |&c| Word::from_code(c, self.depth))
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.len() == self.depth
            && w
                .code()
                .is_some_and(|c| self.codes().binary_search(&c).is_ok())
    }
}

/// All extendible nodes of length `n`.
pub fn levels(e: &ClassExpr, n: usize, limits: &Limits) -> Result<Level> {
    limits.check_enum(n)?;
    let mut codes = Vec::new();
    collect(e, e.start(), 0, 0, n, &mut codes);
    Ok(Level::materialized(n, codes))
}

fn collect(
    e: &ClassExpr,
    state: crate::class::State,
    code: u64,
    len: usize,
    n: usize,
    out: &mut Vec<u64>,
) {
    if len == n {
        out.push(code);
        return;
    }
    for bit in [false, true] {
        if let Some(next) = e.step(&state, bit) {
            collect(e, next, (code << 1) | bit as u64, len + 1, n, out);
        }
    }
}

/// `#T_P↾n`.
pub fn count(e: &ClassExpr, n: u64, limits: &Limits) -> Result<BigUint> {
    limits.check_count(n)?;
    Ok(count_from(e, &e.start(), n))
}

/// Number of length-`n` extendible nodes extending `sigma`.
pub fn extensions_count(e: &ClassExpr, sigma: &Word, n: usize) -> Result<BigUint> {
    let state = e
        .walk(sigma)
        .ok_or_else(|| Error::NotExtendible(sigma.clone()))?;
    if n < sigma.len() {
        return Err(Error::Precondition(format!(
            "depth {n} is shorter than the node {}",
            sigma.to_dsl()
        )));
    }
    Ok(count_from(e, &state, (n - sigma.len()) as u64))
}

/// Like [`extensions_count`] for every depth `|σ| ..= max_depth` at once;
/// entry `k` is the count at depth `|σ| + k`.
pub fn extension_counts(e: &ClassExpr, sigma: &Word, max_depth: usize) -> Result<Vec<BigUint>> {
    let state = e
        .walk(sigma)
        .ok_or_else(|| Error::NotExtendible(sigma.clone()))?;
    Ok(counts_from(e, &state, max_depth.saturating_sub(sigma.len())))
}

/// `#T_P↾n` for every `n ≤ max_depth`.
pub fn level_counts(e: &ClassExpr, max_depth: usize) -> Vec<BigUint> {
    counts_from(e, &e.start(), max_depth)
}

/// Levels of a raw tree, dead ends included.
pub fn raw_levels(t: &RawTree, n: usize) -> Result<Level> {
    check_raw_depth(t, n)?;
    let mut codes = Vec::new();
    if t.contains(&Word::empty()) {
        raw_collect(t, Word::empty(), n, &mut codes);
    }
    Ok(Level::materialized(n, codes))
}

fn raw_collect(t: &RawTree, w: Word, n: usize, out: &mut Vec<u64>) {
    if w.len() == n {
        out.push(w.code().expect("depth checked against the packing limit"));
        return;
    }
    for bit in [false, true] {
        let child = w.child(bit);
        if t.contains(&child) {
            raw_collect(t, child, n, out);
        }
    }
}

/// Length-`n` members of a raw tree extending `sigma`; zero when `sigma`
/// is not a member.
pub fn raw_extensions_count(t: &RawTree, sigma: &Word, n: usize) -> Result<BigUint> {
    check_raw_depth(t, n)?;
    if n < sigma.len() {
        return Err(Error::Precondition(format!(
            "depth {n} is shorter than the node {}",
            sigma.to_dsl()
        )));
    }
    if !t.contains(sigma) {
        return Ok(BigUint::default());
    }
    let mut codes = Vec::new();
    raw_collect(t, sigma.clone(), n, &mut codes);
    Ok(BigUint::from(codes.len()))
}

fn check_raw_depth(t: &RawTree, n: usize) -> Result<()> {
    let limit = t.max_depth().min(MAX_ENUM_DEPTH);
    if n > limit {
        return Err(Error::DepthLimit {
            kind: "raw tree",
            requested: n as u64,
            limit: limit as u64,
        });
    }
    Ok(())
}
