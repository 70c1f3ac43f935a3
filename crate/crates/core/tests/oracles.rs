//! Brute-force oracles: extendibility decided straight from each class's
//! definition, levels found by enumerating all words, and every derived
//! quantity recomputed from those sets.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use pitree::catalog::{builtins, random_expr};
use pitree::homogeneity::{a_hom_constant, check_n_hom, check_ss, check_weak_n_hom};
use pitree::measure::{mu, phi_map, ratio, theta};
use pitree::rational::{from_u64, pow2, ExactRational};
use pitree::tree::{count, extensions_count, levels, Limits};
use pitree::{ClassExpr, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DEPTH: usize = 10;

/// Prefix extendibility read off the definition. `None` for the one class
/// with no closed-form description.
fn ext(e: &ClassExpr, w: &Word) -> Option<bool> {
    Some(match e {
        ClassExpr::Full => true,
        ClassExpr::Point(p) => *w == p.prefix(w.len()),
        ClassExpr::Sft(b) => {
            let l = b.block_len();
            let full = w.len() / l;
            (0..full).all(|k| b.blocks().contains(&w.prefix((k + 1) * l).suffix_from(k * l)))
                && b.completions(&w.suffix_from(full * l)) > 0
        }
        ClassExpr::Sep(s) => (0..w.len()).all(|i| s.forced(i).is_none_or(|b| b == w.bit(i))),
        ClassExpr::Prod(a, b) => {
            let t = w.deinterleave(2);
            ext(a, &t[0])? && ext(b, &t[1])?
        }
        ClassExpr::DSum(a, b) => match w.bits().first() {
            None => true,
            Some(false) => ext(a, &w.suffix_from(1))?,
            Some(true) => ext(b, &w.suffix_from(1))?,
        },
        ClassExpr::Union(a, b) => ext(a, w)? || ext(b, w)?,
        ClassExpr::Cyl(p, body) => {
            if w.len() <= p.len() {
                w.is_prefix_of(p)
            } else {
                p.is_prefix_of(w) && ext(body, &w.suffix_from(p.len()))?
            }
        }
        ClassExpr::Diag(n) => {
            let t = w.deinterleave(n.get());
            t.iter().all(|x| x.is_prefix_of(&t[0]))
        }
        ClassExpr::Ex3 => match w.bits().split_first() {
            None => true,
            Some((&first, rest)) => rest.iter().enumerate().all(|(i, &b)| {
                let r = i % 4;
                if first {
                    r < 2 || b
                } else {
                    r >= 2 || !b
                }
            }),
        },
        ClassExpr::Ex6 => !w.to_string().contains("10"),
        ClassExpr::AHomDiag => return None,
    })
}

struct Brute {
    levels: Vec<BTreeSet<Word>>,
}

impl Brute {
    fn new(e: &ClassExpr, depth: usize) -> Option<Self> {
        let mut levels = Vec::new();
        for n in 0..=depth {
            let mut set = BTreeSet::new();
            for w in Word::all_of_length(n) {
                if ext(e, &w)? {
                    set.insert(w);
                }
            }
            levels.push(set);
        }
        Some(Brute { levels })
    }

    fn has(&self, w: &Word) -> bool {
        self.levels[w.len()].contains(w)
    }

    fn theta(&self, w: &Word) -> usize {
        (1..=w.len())
            .filter(|&j| self.has(&w.prefix(j).flip_last().unwrap()))
            .count()
    }

    fn extensions(&self, w: &Word, n: usize) -> usize {
        self.levels[n].iter().filter(|t| w.is_prefix_of(t)).count()
    }

    /// Suffixes of length `k` that extend `w` inside the tree.
    fn ext_set(&self, w: &Word, k: usize) -> BTreeSet<Word> {
        self.levels[w.len() + k]
            .iter()
            .filter(|t| w.is_prefix_of(t))
            .map(|t| t.suffix_from(w.len()))
            .collect()
    }
}

fn subjects() -> Vec<ClassExpr> {
    let mut out: Vec<ClassExpr> = builtins()
        .into_iter()
        .filter(|e| *e != ClassExpr::AHomDiag)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for size in [2, 3, 3, 4, 4, 5, 5, 6] {
        for _ in 0..3 {
            out.push(random_expr(&mut rng, size));
        }
    }
    out
}

fn q(a: usize, b: usize) -> ExactRational {
    from_u64(a as u64) / from_u64(b as u64)
}

#[test]
fn levels_and_counts_match_enumeration() {
    for e in subjects() {
        let b = Brute::new(&e, DEPTH).unwrap();
        for n in 0..=DEPTH {
            let got: BTreeSet<Word> = levels(&e, n, &Limits::default()).unwrap().words().collect();
            assert_eq!(got, b.levels[n], "{e} at {n}");
            assert_eq!(
                count(&e, n as u64, &Limits::default()).unwrap(),
                BigUint::from(b.levels[n].len()),
                "{e} at {n}"
            );
        }
    }
}

#[test]
fn no_dead_ends() {
    for e in subjects() {
        let b = Brute::new(&e, DEPTH).unwrap();
        for n in 0..DEPTH {
            for w in &b.levels[n] {
                assert!(b.has(&w.child(false)) || b.has(&w.child(true)), "{e}: {w:?}");
            }
        }
    }
}

#[test]
fn theta_mu_and_ratio_match_enumeration() {
    for e in subjects() {
        let b = Brute::new(&e, DEPTH).unwrap();
        for m in 0..=6 {
            for s in &b.levels[m] {
                let t = b.theta(s);
                assert_eq!(theta(&e, s).unwrap(), t, "{e}: {s:?}");
                assert_eq!(mu(&e, s), pow2(-(t as i64)), "{e}: {s:?}");
                for n in m..=DEPTH {
                    let x = b.extensions(s, n);
                    assert_eq!(extensions_count(&e, s, n).unwrap(), BigUint::from(x));
                    assert_eq!(ratio(&e, s, n).unwrap(), q(x, b.levels[n].len()), "{e}: {s:?} {n}");
                }
            }
        }
        let off: Vec<Word> = Word::all_of_length(4).filter(|w| !b.has(w)).collect();
        for s in off {
            assert!(theta(&e, &s).is_err());
            assert_eq!(mu(&e, &s), from_u64(0));
            assert_eq!(ratio(&e, &s, DEPTH).unwrap(), from_u64(0));
        }
    }
}

#[test]
fn phi_reads_the_input_bit_at_each_branching_level() {
    for e in subjects() {
        let b = Brute::new(&e, 8).unwrap();
        for x in Word::all_of_length(8) {
            let mut out = Word::empty();
            for i in 0..8 {
                let kids: Vec<Word> = [false, true]
                    .into_iter()
                    .map(|bit| out.child(bit))
                    .filter(|c| b.has(c))
                    .collect();
                out = if kids.len() == 2 {
                    out.child(x.bit(i))
                } else {
                    kids[0].clone()
                };
            }
            assert_eq!(phi_map(&e, &x), out, "{e}: {x:?}");
        }
    }
}

#[test]
fn homogeneity_verdicts_match_enumeration() {
    let d = 8;
    for e in subjects() {
        let b = Brute::new(&e, d).unwrap();
        let ss = (0..d).all(|n| {
            let pats: BTreeSet<BTreeSet<Word>> = b.levels[n].iter().map(|w| b.ext_set(w, 1)).collect();
            pats.len() <= 1
        });
        assert_eq!(check_ss(&e, d).holds, ss, "{e}");
        for k in [2, 3, 4] {
            let nhom = (0..)
                .map(|j| j * k)
                .take_while(|s| s + k <= d)
                .all(|s| {
                    let sets: BTreeSet<BTreeSet<Word>> =
                        b.levels[s].iter().map(|w| b.ext_set(w, k)).collect();
                    sets.len() <= 1
                });
            let weak = (0..)
                .map(|j| j * k)
                .take_while(|s| s + k <= d)
                .all(|s| {
                    let sizes: BTreeSet<usize> =
                        b.levels[s].iter().map(|w| b.ext_set(w, k).len()).collect();
                    sizes.len() <= 1
                });
            assert_eq!(check_n_hom(&e, k, d).unwrap().holds, nhom, "{e} n = {k}");
            assert_eq!(check_weak_n_hom(&e, k, d).unwrap().holds, weak, "{e} n = {k}");
        }
        let spread = (0..=d)
            .map(|n| {
                let ts: Vec<usize> = b.levels[n].iter().map(|w| b.theta(w)).collect();
                ts.iter().max().unwrap() - ts.iter().min().unwrap()
            })
            .max()
            .unwrap();
        assert_eq!(a_hom_constant(&e, d).constant, spread, "{e}");
    }
}

#[test]
fn measure_sums_to_one_on_every_level() {
    for e in subjects() {
        let b = Brute::new(&e, DEPTH).unwrap();
        for n in 0..=DEPTH {
            let total: ExactRational = b.levels[n].iter().map(|w| mu(&e, w)).sum();
            assert_eq!(total, from_u64(1), "{e} at {n}");
        }
    }
}

#[test]
fn ahomdiag_constant_via_theta_table() {
    let e = ClassExpr::AHomDiag;
    let mut spread: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for n in 0..=14 {
        for w in levels(&e, n, &Limits::default()).unwrap().words() {
            let t = theta(&e, &w).unwrap();
            let entry = spread.entry(n).or_insert((t, t));
            entry.0 = entry.0.min(t);
            entry.1 = entry.1.max(t);
        }
    }
    let c = spread.values().map(|(lo, hi)| hi - lo).max().unwrap();
    assert_eq!(c, 1);
    assert_eq!(a_hom_constant(&e, 14).constant, c);
}
