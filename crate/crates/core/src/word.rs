//! Finite binary words.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite binary string. The empty word is valid.
///
/// Ordering is lexicographic with a proper prefix sorting before its
/// extensions, so words of a fixed length sort in the usual dictionary order.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    bits: Vec<bool>,
}

impl Word {
    pub fn empty() -> Self {
        Word { bits: Vec::new() }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Word {
            bits: bits.into_iter().collect(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Word {
            bits: vec![false; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Word { bits: vec![true; n] }
    }

    /// Decodes the low `len` bits of `code`, most significant bit first.
    pub fn from_code(code: u64, len: usize) -> Self {
        debug_assert!(len <= 64);
        Word {
            bits: (0..len).map(|i| (code >> (len - 1 - i)) & 1 == 1).collect(),
        }
    }

    /// Packs the word into an integer, first bit most significant.
    /// Numeric order of codes equals lexicographic order for a fixed length.
    pub fn code(&self) -> Option<u64> {
        if self.bits.len() > 64 {
            return None;
        }
        Some(self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn pop(&mut self) -> Option<bool> {
        self.bits.pop()
    }

    pub fn child(&self, bit: bool) -> Word {
        let mut w = self.clone();
        w.push(bit);
        w
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Word { bits }
    }

    /// The initial segment of length `n` (the whole word if `n >= len`).
    pub fn prefix(&self, n: usize) -> Word {
        Word {
            bits: self.bits[..n.min(self.bits.len())].to_vec(),
        }
    }

    pub fn suffix_from(&self, n: usize) -> Word {
        Word {
            bits: self.bits[n.min(self.bits.len())..].to_vec(),
        }
    }

    /// The sibling obtained by flipping the last bit.
    pub fn flip_last(&self) -> Result<Word> {
        let mut bits = self.bits.clone();
        match bits.last_mut() {
            Some(b) => {
                *b = !*b;
                Ok(Word { bits })
            }
            None => Err(Error::FlipEmpty),
        }
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.bits.len() <= other.bits.len() && other.bits[..self.bits.len()] == self.bits[..]
    }

    /// True when one word is a prefix of the other.
    pub fn compatible(&self, other: &Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Splits into `k` tracks: track `j` holds positions `i` with `i % k == j`.
    pub fn deinterleave(&self, k: usize) -> Vec<Word> {
        let mut tracks = vec![Word::empty(); k];
        for (i, &b) in self.bits.iter().enumerate() {
            tracks[i % k].push(b);
        }
        tracks
    }

    /// Interleaves `left` and `right`, starting with `left`. Lengths must
    /// differ by at most one with `left` the longer.
    pub fn interleave(left: &Word, right: &Word) -> Word {
        debug_assert!(left.len() == right.len() || left.len() == right.len() + 1);
        let mut bits = Vec::with_capacity(left.len() + right.len());
        for i in 0..left.len() {
            bits.push(left.bits[i]);
            if i < right.len() {
                bits.push(right.bits[i]);
            }
        }
        Word { bits }
    }

    /// All words of length `n` in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = Word> {
        assert!(n < 64, "exhaustive enumeration limited to lengths below 64");
        (0..1u64 << n).map(move |c| Word::from_code(c, n))
    }

    /// DSL spelling: `e` for the empty word, otherwise the bits.
    pub fn to_dsl(&self) -> String {
        if self.is_empty() {
            "e".to_string()
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self.to_dsl())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts `[01]*`, or `e` for the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" {
            return Ok(Word::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidWord(format!(
                    "unexpected character {other:?} in word {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(|bits| Word { bits })
    }
}

impl From<&[bool]> for Word {
    fn from(bits: &[bool]) -> Self {
        Word {
            bits: bits.to_vec(),
        }
    }
}

/// Shorthand for tests and examples: panics on malformed input.
pub fn w(s: &str) -> Word {
    s.parse().expect("malformed word literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flip_last_on_empty_is_an_error() {
        assert!(matches!(Word::empty().flip_last(), Err(Error::FlipEmpty)));
        assert_eq!(w("0110").flip_last().unwrap(), w("0111"));
    }

    #[test]
    fn lexicographic_order_within_a_length() {
        let words: Vec<Word> = Word::all_of_length(3).collect();
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
        assert!(w("0") < w("00"));
    }

    #[test]
    fn codes_round_trip() {
        for word in Word::all_of_length(5) {
            assert_eq!(Word::from_code(word.code().unwrap(), 5), word);
        }
    }

    #[test]
    fn interleave_inverts_deinterleave() {
        let x = w("1101001");
        let tracks = x.deinterleave(2);
        assert_eq!(tracks[0], w("1001"));
        assert_eq!(tracks[1], w("110"));
        assert_eq!(Word::interleave(&tracks[0], &tracks[1]), x);
    }

    #[test]
    fn parses_empty_spelling() {
        assert_eq!(w("e"), Word::empty());
        assert_eq!(w(""), Word::empty());
        assert!("012".parse::<Word>().is_err());
    }
}
