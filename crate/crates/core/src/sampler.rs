//! Coin-tossing path production.
//!
//! A path is produced by reading one bit from a source at every branching
//! node and taking the only child elsewhere. The branch indicator `B`, the
//! consumed bits `R` and the forced bits `N` determine the path via
//! [`merge`].
//!
//! The pseudorandom source is ChaCha8 seeded with `seed_from_u64(seed)`.
//! Bits are taken from successive `next_u64` outputs, most significant bit
//! first. For parallel sampling, chunk `i` of [`SAMPLE_CHUNK`] samples uses
//! the same seed on stream `i`, so results do not depend on the number of
//! worker threads.

use std::collections::HashMap;
use std::path::Path;

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::class::ClassExpr;
use crate::error::{Error, Result};
use crate::measure::mu;
use crate::rational::{self, to_text, ExactRational};
use crate::tree::{levels, Limits};
use crate::word::Word;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_0001;
/// Samples per independently seeded stream.
pub const SAMPLE_CHUNK: usize = 4096;

/// A stream of bits standing in for a random oracle.
#[derive(Clone, Debug)]
pub enum BitSource {
    Prng {
        seed: u64,
        rng: Box<ChaCha8Rng>,
        buffer: u64,
        left: u32,
        consumed: u64,
    },
    /// Finite bits, from a file or a fixed word. Reading past the end is
    /// an error.
    Finite { bits: Vec<bool>, consumed: u64 },
}

impl BitSource {
    pub fn prng(seed: u64) -> Self {
        Self::prng_stream(seed, 0)
    }

    pub fn prng_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        BitSource::Prng {
            seed,
            rng: Box::new(rng),
            buffer: 0,
            left: 0,
            consumed: 0,
        }
    }

    pub fn fixed(w: &Word) -> Self {
        BitSource::Finite {
            bits: w.bits().to_vec(),
            consumed: 0,
        }
    }

    /// Raw `0`/`1` text with whitespace ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut bits = Vec::new();
        for c in text.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                c => return Err(Error::InvalidWord(format!("unexpected {c:?} in bit file"))),
            }
        }
        Ok(BitSource::Finite { bits, consumed: 0 })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn consumed(&self) -> u64 {
        match self {
            BitSource::Prng { consumed, .. } | BitSource::Finite { consumed, .. } => *consumed,
        }
    }

    pub fn next_bit(&mut self) -> Result<bool> {
        match self {
            BitSource::Prng {
                rng,
                buffer,
                left,
                consumed,
                ..
            } => {
                if *left == 0 {
                    *buffer = rng.next_u64();
                    *left = 64;
                }
                *left -= 1;
                *consumed += 1;
                Ok((*buffer >> *left) & 1 == 1)
            }
            BitSource::Finite { bits, consumed } => {
                let bit = *bits
                    .get(*consumed as usize)
                    .ok_or(Error::SourceExhausted { consumed: *consumed })?;
                *consumed += 1;
                Ok(bit)
            }
        }
    }
}

/// A produced prefix `X↾n` with its decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSample {
    pub prefix: Word,
    /// `branches[j]` is 1 when the sibling of `X↾(j+1)` is extendible.
    pub branches: Word,
    /// Source bits read, one per branching level.
    pub tossed: Word,
    /// Bits taken at non-branching levels.
    pub forced: Word,
    pub bits_consumed: usize,
}

impl PathSample {
    pub fn to_json(&self) -> Value {
        json!({
            "prefix": self.prefix.to_dsl(),
            "branches": self.branches.to_dsl(),
            "tossed": self.tossed.to_dsl(),
            "forced": self.forced.to_dsl(),
            "bits_consumed": self.bits_consumed,
        })
    }
}

pub fn produce_path(e: &ClassExpr, src: &mut BitSource, n: usize) -> Result<PathSample> {
    let mut state = e.start();
    let mut sample = PathSample {
        prefix: Word::empty(),
        branches: Word::empty(),
        tossed: Word::empty(),
        forced: Word::empty(),
        bits_consumed: 0,
    };
    for _ in 0..n {
        let [c0, c1] = e.children(&state);
        let branching = c0.is_some() && c1.is_some();
        let (bit, next) = match (c0, c1) {
            (Some(a), Some(b)) => {
                let bit = src.next_bit()?;
                sample.tossed.push(bit);
                (bit, if bit { b } else { a })
            }
            (Some(a), None) => {
                sample.forced.push(false);
                (false, a)
            }
            (None, Some(b)) => {
                sample.forced.push(true);
                (true, b)
            }
            (None, None) => unreachable!("reachable states have a child"),
        };
        sample.branches.push(branching);
        sample.prefix.push(bit);
        state = next;
    }
    sample.bits_consumed = sample.tossed.len();
    Ok(sample)
}

/// Places `r` at the positions where `w` is 1 and `n` where it is 0.
pub fn merge(w: &Word, r: &Word, n: &Word) -> Result<Word> {
    let ones = w.count_ones();
    if ones != r.len() || w.len() - ones != n.len() {
        return Err(Error::LengthMismatch(format!(
            "shape {} has {ones} ones and {} zeros, got {} and {} bits",
            w.to_dsl(),
            w.len() - ones,
            r.len(),
            n.len()
        )));
    }
    let (mut ri, mut ni) = (r.iter(), n.iter());
    Ok(Word::from_bits(w.iter().map(|b| {
        if b {
            ri.next().expect("counted")
        } else {
            ni.next().expect("counted")
        }
    })))
}

/// Inverse of [`merge`].
pub fn split(w: &Word, x: &Word) -> Result<(Word, Word)> {
    if w.len() != x.len() {
        return Err(Error::LengthMismatch(format!(
            "shape has length {}, word has length {}",
            w.len(),
            x.len()
        )));
    }
    let mut r = Word::empty();
    let mut n = Word::empty();
    for (b, bit) in w.iter().zip(x.iter()) {
        if b {
            r.push(bit);
        } else {
            n.push(bit);
        }
    }
    Ok((r, n))
}

/// Histogram of sampled level-`depth` nodes against `μ_P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalReport {
    pub depth: usize,
    pub samples: u64,
    pub seed: u64,
    /// Every node of the level with its sample count and `μ_P`.
    pub rows: Vec<(Word, u64, ExactRational)>,
    /// `½ Σ |count/samples - μ_P|`.
    pub tv: ExactRational,
}

impl EmpiricalReport {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|(w, c, m)| json!({"node": w.to_dsl(), "count": c, "mu": to_text(m)}))
            .collect();
        json!({
            "depth": self.depth,
            "samples": self.samples,
            "seed": self.seed,
            "tv": to_text(&self.tv),
            "rows": rows,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,count,mu\n");
        for (w, c, m) in &self.rows {
            out.push_str(&format!("{},{c},{}\n", w.to_dsl(), to_text(m)));
        }
        out
    }
}

pub fn empirical_measure(
    e: &ClassExpr,
    depth: usize,
    samples: u64,
    seed: u64,
    limits: &Limits,
) -> Result<EmpiricalReport> {
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is needed".into()));
    }
    let level = levels(e, depth, limits)?;
    let chunks = samples.div_ceil(SAMPLE_CHUNK as u64);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<HashMap<Word, u64>> {
            let mut src = BitSource::prng_stream(seed, chunk);
            let size = (samples - chunk * SAMPLE_CHUNK as u64).min(SAMPLE_CHUNK as u64);
            let mut hist = HashMap::new();
            for _ in 0..size {
                *hist.entry(produce_path(e, &mut src, depth)?.prefix).or_insert(0) += 1;
            }
            Ok(hist)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })?;
    let total = rational::from_u64(samples);
    let mut tv = rational::zero();
    let rows: Vec<(Word, u64, ExactRational)> = level
        .words()
        .map(|w| {
            let c = counts.get(&w).copied().unwrap_or(0);
            let m = mu(e, &w);
            let diff = rational::from_u64(c) / &total - &m;
            tv += if diff < rational::zero() { -diff } else { diff };
            (w, c, m)
        })
        .collect();
    tv /= rational::from_u64(2);
    Ok(EmpiricalReport {
        depth,
        samples,
        seed,
        rows,
        tv,
    })
}

/// Distribution of produced level-`n` nodes when the source runs over all
/// words of length `m`, as node counts out of `2^m`.
pub fn fixed_word_distribution(e: &ClassExpr, n: usize, m: usize) -> Result<HashMap<Word, BigUint>> {
    let mut out: HashMap<Word, BigUint> = HashMap::new();
    for r in Word::all_of_length(m) {
        let mut src = BitSource::fixed(&r);
        let sample = produce_path(e, &mut src, n)?;
        *out.entry(sample.prefix).or_default() += 1u32;
    }
    Ok(out)
}
