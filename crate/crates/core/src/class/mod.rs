//! The combinator algebra of effectively closed classes.
//!
//! A [`ClassExpr`] denotes a nonempty closed subset of Cantor space. Every
//! constructor compiles to a deterministic automaton over `{0,1}` whose
//! accepted words are exactly the extendible nodes of the denoted class, so
//! the tree it recognises never has dead ends. See [`automaton`].

pub mod automaton;
pub mod parse;
pub mod raw;

use std::collections::BTreeSet;
use std::fmt;
use std::num::NonZeroUsize;

use crate::error::{Error, Result};
use crate::word::Word;

pub use automaton::State;
pub use parse::parse;
pub use raw::RawTree;

/// Abstract syntax of a class expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ClassExpr {
    /// The whole space.
    Full,
    /// A single eventually periodic sequence.
    Point(PeriodicPoint),
    /// All concatenations of allowed equal-length blocks.
    Sft(BlockSet),
    /// Separating sets: bit `i` is 1 for `i` in A and 0 for `i` in B.
    Sep(Separation),
    /// Interleaving product `X ⊕ Y` of members.
    Prod(Box<ClassExpr>, Box<ClassExpr>),
    /// Disjoint sum `{0X} ∪ {1Y}`.
    DSum(Box<ClassExpr>, Box<ClassExpr>),
    Union(Box<ClassExpr>, Box<ClassExpr>),
    /// `{p X : X ∈ body}`.
    Cyl(Word, Box<ClassExpr>),
    /// `n` interleaved copies of one sequence.
    Diag(NonZeroUsize),
    /// Additively homogeneous class that diagonalises against weak
    /// n-homogeneity for every n ≥ 2.
    AHomDiag,
    /// `0X` with `X(4n) = X(4n+1) = 0`, together with `1X` with
    /// `X(4n+2) = X(4n+3) = 1`.
    Ex3,
    /// `{0^n 1^ω : n} ∪ {0^ω}`.
    Ex6,
}

/// Preperiod plus a nonempty period.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicPoint {
    preperiod: Word,
    period: Word,
}

impl PeriodicPoint {
    pub fn new(preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Semantic {
                position: 0,
                message: "point period must be nonempty".into(),
            });
        }
        Ok(PeriodicPoint { preperiod, period })
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    /// Bit `i` of the infinite sequence.
    pub fn bit(&self, i: usize) -> bool {
        let pre = self.preperiod.len();
        if i < pre {
            self.preperiod.bit(i)
        } else {
            self.period.bit((i - pre) % self.period.len())
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word::from_bits((0..n).map(|i| self.bit(i)))
    }
}

/// A nonempty set of allowed blocks sharing one length `b ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockSet {
    blocks: BTreeSet<Word>,
    len: usize,
}

impl BlockSet {
    pub fn new<I: IntoIterator<Item = Word>>(blocks: I) -> Result<Self> {
        let blocks: BTreeSet<Word> = blocks.into_iter().collect();
        let len = match blocks.iter().next() {
            Some(b) => b.len(),
            None => {
                return Err(Error::Semantic {
                    position: 0,
                    message: "sft needs at least one block".into(),
                })
            }
        };
        if len == 0 {
            return Err(Error::Semantic {
                position: 0,
                message: "sft blocks must be nonempty".into(),
            });
        }
        if let Some(bad) = blocks.iter().find(|b| b.len() != len) {
            return Err(Error::Semantic {
                position: 0,
                message: format!(
                    "sft blocks must share one length: {} has length {}, expected {len}",
                    bad,
                    bad.len()
                ),
            });
        }
        Ok(BlockSet { blocks, len })
    }

    pub fn blocks(&self) -> &BTreeSet<Word> {
        &self.blocks
    }

    pub fn block_len(&self) -> usize {
        self.len
    }

    /// Number of allowed blocks having `p` as a prefix.
    pub fn completions(&self, p: &Word) -> usize {
        self.blocks.iter().filter(|b| p.is_prefix_of(b)).count()
    }
}

/// Finite disjoint sets: positions forced to 1 and positions forced to 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Separation {
    ones: BTreeSet<usize>,
    zeros: BTreeSet<usize>,
}

impl Separation {
    pub fn new<A, B>(ones: A, zeros: B) -> Result<Self>
    where
        A: IntoIterator<Item = usize>,
        B: IntoIterator<Item = usize>,
    {
        let ones: BTreeSet<usize> = ones.into_iter().collect();
        let zeros: BTreeSet<usize> = zeros.into_iter().collect();
        if let Some(i) = ones.intersection(&zeros).next() {
            return Err(Error::Semantic {
                position: 0,
                message: format!("sep sets must be disjoint; {i} occurs in both"),
            });
        }
        Ok(Separation { ones, zeros })
    }

    pub fn ones(&self) -> &BTreeSet<usize> {
        &self.ones
    }

    pub fn zeros(&self) -> &BTreeSet<usize> {
        &self.zeros
    }

    /// The forced value at position `i`, if any.
    pub fn forced(&self, i: usize) -> Option<bool> {
        if self.ones.contains(&i) {
            Some(true)
        } else if self.zeros.contains(&i) {
            Some(false)
        } else {
            None
        }
    }

    /// One past the largest constrained position.
    pub fn bound(&self) -> usize {
        self.ones
            .iter()
            .chain(self.zeros.iter())
            .max()
            .map_or(0, |m| m + 1)
    }
}

impl ClassExpr {
    pub fn point(preperiod: Word, period: Word) -> Result<Self> {
        Ok(ClassExpr::Point(PeriodicPoint::new(preperiod, period)?))
    }

    pub fn sft<I: IntoIterator<Item = Word>>(blocks: I) -> Result<Self> {
        Ok(ClassExpr::Sft(BlockSet::new(blocks)?))
    }

    pub fn sep<A, B>(ones: A, zeros: B) -> Result<Self>
    where
        A: IntoIterator<Item = usize>,
        B: IntoIterator<Item = usize>,
    {
        Ok(ClassExpr::Sep(Separation::new(ones, zeros)?))
    }

    pub fn prod(left: ClassExpr, right: ClassExpr) -> Self {
        ClassExpr::Prod(Box::new(left), Box::new(right))
    }

    pub fn dsum(left: ClassExpr, right: ClassExpr) -> Self {
        ClassExpr::DSum(Box::new(left), Box::new(right))
    }

    pub fn union(left: ClassExpr, right: ClassExpr) -> Self {
        ClassExpr::Union(Box::new(left), Box::new(right))
    }

    pub fn cyl(prefix: Word, body: ClassExpr) -> Self {
        ClassExpr::Cyl(prefix, Box::new(body))
    }

    pub fn diag(n: usize) -> Result<Self> {
        NonZeroUsize::new(n)
            .map(ClassExpr::Diag)
            .ok_or_else(|| Error::Semantic {
                position: 0,
                message: "diag needs n >= 1".into(),
            })
    }

    pub fn ex3() -> Self {
        ClassExpr::Ex3
    }

    pub fn ex6() -> Self {
        ClassExpr::Ex6
    }

    /// Whether `w` is an extendible node of the denoted class.
    pub fn extendible(&self, w: &Word) -> bool {
        self.walk(w).is_some()
    }

    /// Number of combinator nodes in the expression.
    pub fn size(&self) -> usize {
        match self {
            ClassExpr::Prod(l, r) | ClassExpr::DSum(l, r) | ClassExpr::Union(l, r) => {
                1 + l.size() + r.size()
            }
            ClassExpr::Cyl(_, b) => 1 + b.size(),
            _ => 1,
        }
    }

    /// Canonical DSL text; `parse(&e.to_dsl())` returns `e`.
    pub fn to_dsl(&self) -> String {
        self.to_string()
    }

    /// Stable hexadecimal digest of the canonical text.
    pub fn canonical_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_dsl().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassExpr::Full => f.write_str("full"),
            ClassExpr::Ex3 => f.write_str("ex3"),
            ClassExpr::Ex6 => f.write_str("ex6"),
            ClassExpr::AHomDiag => f.write_str("ahomdiag"),
            ClassExpr::Point(p) => {
                if p.period.len() == 1 {
                    write!(f, "point({}{}*)", p.preperiod, p.period)
                } else {
                    write!(f, "point({}({})*)", p.preperiod.to_dsl(), p.period)
                }
            }
            ClassExpr::Sft(s) => write!(f, "sft{{{}}}", join(s.blocks.iter())),
            ClassExpr::Sep(s) => write!(f, "sep({};{})", join(&s.ones), join(&s.zeros)),
            ClassExpr::Prod(l, r) => write!(f, "prod({l},{r})"),
            ClassExpr::DSum(l, r) => write!(f, "dsum({l},{r})"),
            ClassExpr::Union(l, r) => write!(f, "union({l},{r})"),
            ClassExpr::Cyl(p, b) => write!(f, "cyl({},{b})", p.to_dsl()),
            ClassExpr::Diag(n) => write!(f, "diag({n})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    #[test]
    fn point_bits_cycle_after_preperiod() {
        let p = PeriodicPoint::new(w("01"), w("10")).unwrap();
        assert_eq!(p.prefix(7), w("0110101"));
    }

    #[test]
    fn rejects_invalid_components() {
        assert!(ClassExpr::sep([0, 2], [2]).is_err());
        assert!(ClassExpr::sft([w("00"), w("1")]).is_err());
        assert!(ClassExpr::point(w("0"), Word::empty()).is_err());
        assert!(ClassExpr::diag(0).is_err());
    }

    #[test]
    fn printing_is_parseable() {
        let e = ClassExpr::dsum(
            ClassExpr::Full,
            ClassExpr::point(Word::empty(), w("0")).unwrap(),
        );
        assert_eq!(e.to_dsl(), "dsum(full,point(0*))");
        let q = ClassExpr::point(Word::empty(), w("01")).unwrap();
        assert_eq!(q.to_dsl(), "point(e(01)*)");
    }

    #[test]
    fn hash_depends_only_on_canonical_text() {
        let a = parse("union( cyl(00,full), cyl(1 , full))").unwrap();
        let b = parse("union(cyl(00,full),cyl(1,full))").unwrap();
        assert_eq!(a.canonical_hash(), b.canonical_hash());
        assert_ne!(a.canonical_hash(), ClassExpr::Full.canonical_hash());
    }
}
