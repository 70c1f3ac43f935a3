//! Verification suites: every check here encodes a proved statement, so any
//! failure indicates a bug in this crate.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::catalog::{self, random_expr, MEASURED, SEPARATIONS};
use crate::class::{parse, ClassExpr};
use crate::density::check_dagger_inequality;
use crate::error::{Error, Result};
use crate::homogeneity::{verify_branch_lemma, verify_implications, Hypothesis};
use crate::measure::{branching_levels, dsum_lambda, mu, phi_map, ratio, theta};
use crate::rational::{self, to_text};
use crate::sampler::{fixed_word_distribution, merge, produce_path, BitSource};
use crate::tree::{level_counts, levels, Limits};
use crate::word::Word;

/// Seed for the random pairs of the product and sum suites.
pub const PAIR_SEED: u64 = 2024;
/// Number of random pairs.
pub const PAIRS: usize = 20;
/// Longest exhaustive source word in the sampler suite.
const SAMPLER_WORDS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Branch,
    Ss,
    WeakVl,
    AHom,
    Product,
    DSum,
    Phi,
    Sampler,
    MeasureBound,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Branch,
        Suite::Ss,
        Suite::WeakVl,
        Suite::AHom,
        Suite::Product,
        Suite::DSum,
        Suite::Phi,
        Suite::Sampler,
        Suite::MeasureBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Branch => "branch",
            Suite::Ss => "ss",
            Suite::WeakVl => "weak-vl",
            Suite::AHom => "ahom",
            Suite::Product => "product",
            Suite::DSum => "dsum",
            Suite::Phi => "phi",
            Suite::Sampler => "sampler",
            Suite::MeasureBound => "measure-bound",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: String,
    pub depth: usize,
    pub checks: u64,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(suite: Suite, depth: usize) -> Self {
        SuiteResult {
            name: suite.name().into(),
            depth,
            ..Default::default()
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn absorb(&mut self, other: SuiteResult) {
        self.checks += other.checks;
        self.failures.extend(other.failures);
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.name,
            "depth": self.depth,
            "checks": self.checks,
            "ok": self.ok(),
            "failures": self.failures,
        })
    }
}

pub fn run(suite: Suite, depth: usize) -> SuiteResult {
    match suite {
        Suite::Branch => branch(depth),
        Suite::Ss => ss(depth),
        Suite::WeakVl => weak_vl(depth),
        Suite::AHom => ahom(depth),
        Suite::Product => product(depth),
        Suite::DSum => dsum(depth),
        Suite::Phi => phi(depth),
        Suite::Sampler => sampler(depth),
        Suite::MeasureBound => measure_bound(depth),
    }
}

pub fn run_all(depth: usize) -> Vec<SuiteResult> {
    Suite::ALL.iter().map(|&s| run(s, depth)).collect()
}

fn branch(depth: usize) -> SuiteResult {
    let mut out = SuiteResult::new(Suite::Branch, depth);
    for e in catalog::builtins() {
        let r = verify_branch_lemma(&e, depth);
        out.checks += r.checks as u64;
        for v in r.violations {
            out.failures.push(format!(
                "{e}: node {} at length {} has {} extensions, clause {} with l = {}",
                v.sigma.to_dsl(),
                v.n,
                v.extensions,
                v.clause,
                v.ell
            ));
        }
    }
    out
}

fn implication(out: &mut SuiteResult, text: &str, h: Hypothesis, depth: usize) {
    let e = parse(text).expect("suite expressions parse");
    match verify_implications(&e, h, depth) {
        Ok(r) => {
            for c in r.checks {
                out.check(c.holds, || {
                    format!("{text}: {} observed {} against {}", c.name, c.observed, c.bound)
                });
            }
        }
        Err(err) => out.check(false, || format!("{text}: {err}")),
    }
}

fn ss(depth: usize) -> SuiteResult {
    let mut out = SuiteResult::new(Suite::Ss, depth);
    for text in SEPARATIONS.iter().chain(&["full"]) {
        implication(&mut out, text, Hypothesis::Ss, depth);
    }
    out
}

fn weak_vl(depth: usize) -> SuiteResult {
    let mut out = SuiteResult::new(Suite::WeakVl, depth);
    implication(&mut out, "ex3", Hypothesis::Weak(4), depth);
    implication(&mut out, "sft{00,01,11}", Hypothesis::Weak(2), depth);
    implication(&mut out, "sep(0,3;1)", Hypothesis::Weak(1), depth);
    out
}

fn ahom(depth: usize) -> SuiteResult {
    let mut out = SuiteResult::new(Suite::AHom, depth);
    implication(&mut out, "ahomdiag", Hypothesis::AHom(1), depth);
    implication(&mut out, "full", Hypothesis::AHom(0), depth);
    implication(&mut out, "sep(1,2,5;0,4)", Hypothesis::AHom(0), depth);
    out
}

/// The seeded random pairs shared by the product and sum suites.
pub fn random_pairs() -> Vec<(ClassExpr, ClassExpr)> {
    let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SEED);
    (0..PAIRS)
        .map(|_| (random_expr(&mut rng, 3), random_expr(&mut rng, 3)))
        .collect()
}

/// Component nodes at one length, at most `cap` of them.
fn sample_nodes(e: &ClassExpr, n: usize, cap: usize) -> Vec<Word> {
    levels(e, n, &Limits::default())
        .expect("small depth")
        .words()
        .take(cap)
        .collect()
}

fn product(depth: usize) -> SuiteResult {
    let pairs = random_pairs();
    let results: Vec<SuiteResult> = pairs
        .par_iter()
        .map(|(a, b)| {
            let mut out = SuiteResult::new(Suite::Product, depth);
            let p = ClassExpr::prod(a.clone(), b.clone());
            let half = depth / 2;
            let (ca, cb, cp) = (level_counts(a, half), level_counts(b, half), level_counts(&p, depth));
            for n in 0..=half {
                out.check(cp[2 * n] == &ca[n] * &cb[n], || {
                    format!("{p}: count at {} is not the product", 2 * n)
                });
            }
            let m = half.min(4);
            for s in sample_nodes(a, m, 8) {
                for t in sample_nodes(b, m, 8) {
                    let x = Word::interleave(&s, &t);
                    out.check(mu(&p, &x) == mu(a, &s) * mu(b, &t), || {
                        format!("{p}: mu at {} is not the product", x.to_dsl())
                    });
                    for n in m..=half {
                        let lhs = ratio(&p, &x, 2 * n).expect("n >= m");
                        let rhs = ratio(a, &s, n).expect("n >= m") * ratio(b, &t, n).expect("n >= m");
                        out.check(lhs == rhs, || {
                            format!("{p}: ratio at {} depth {} is not the product", x.to_dsl(), 2 * n)
                        });
                    }
                }
            }
            out
        })
        .collect();
    merge_results(Suite::Product, depth, results)
}

fn dsum(depth: usize) -> SuiteResult {
    let pairs = random_pairs();
    let mut results: Vec<SuiteResult> = pairs
        .par_iter()
        .map(|(a, b)| {
            let mut out = SuiteResult::new(Suite::DSum, depth);
            let s = ClassExpr::dsum(a.clone(), b.clone());
            let (ca, cb, cs) = (level_counts(a, depth), level_counts(b, depth), level_counts(&s, depth + 1));
            for n in 0..=depth {
                out.check(cs[n + 1] == &ca[n] + &cb[n], || {
                    format!("{s}: count at {} is not the sum", n + 1)
                });
            }
            for (side, comp) in [(false, a), (true, b)] {
                for x in sample_nodes(comp, depth.min(6), 16) {
                    let node = Word::empty().child(side).concat(&x);
                    out.check(mu(&s, &node) == mu(comp, &x) * rational::pow2(-1), || {
                        format!("{s}: mu at {} is not half the component", node.to_dsl())
                    });
                }
            }
            out
        })
        .collect();
    let mut out = SuiteResult::new(Suite::DSum, depth);
    match dsum_lambda(&ClassExpr::Full, &ClassExpr::Full, false, &Word::empty(), depth.max(10), 8) {
        Ok(r) => out.check(r.matched() == Some("corrected"), || {
            format!("full+full: matched {:?}", r.matched())
        }),
        Err(err) => out.check(false, || format!("full+full: {err}")),
    }
    results.push(out);
    merge_results(Suite::DSum, depth, results)
}

fn phi(depth: usize) -> SuiteResult {
    let results: Vec<SuiteResult> = catalog::builtins()
        .par_iter()
        .map(|e| {
            let mut out = SuiteResult::new(Suite::Phi, depth);
            for n in 0..=depth {
                let mut hits: HashMap<Word, u64> = HashMap::new();
                for x in Word::all_of_length(n) {
                    *hits.entry(phi_map(e, &x)).or_insert(0) += 1;
                }
                let level = levels(e, n, &Limits::default()).expect("small depth");
                let mut covered = 0;
                for t in level.words() {
                    let c = hits.get(&t).copied().unwrap_or(0);
                    covered += c;
                    let lhs = rational::from_u64(c) * rational::pow2(-(n as i64));
                    out.check(lhs == mu(e, &t), || {
                        format!("{e}: phi preimage of {} has {c} words", t.to_dsl())
                    });
                }
                out.check(covered == 1 << n, || format!("{e}: phi leaves the tree at {n}"));
            }
            out
        })
        .collect();
    merge_results(Suite::Phi, depth, results)
}

fn sampler(depth: usize) -> SuiteResult {
    let m = depth.min(SAMPLER_WORDS);
    let results: Vec<SuiteResult> = catalog::builtins()
        .par_iter()
        .map(|e| {
            let mut out = SuiteResult::new(Suite::Sampler, depth);
            let diag2 = *e == ClassExpr::diag(2).expect("valid");
            for r in Word::all_of_length(m) {
                let s = match produce_path(e, &mut BitSource::fixed(&r), m) {
                    Ok(s) => s,
                    Err(err) => {
                        out.check(false, || format!("{e}: {err}"));
                        continue;
                    }
                };
                let t = theta(e, &s.prefix);
                out.check(t.as_ref().ok() == Some(&s.bits_consumed), || {
                    format!("{e}: consumed {} bits for {}", s.bits_consumed, s.prefix.to_dsl())
                });
                out.check(branching_levels(e, &s.prefix) == Some(s.branches.clone()), || {
                    format!("{e}: branch word of {} is wrong", s.prefix.to_dsl())
                });
                out.check(
                    merge(&s.branches, &s.tossed, &s.forced).ok() == Some(s.prefix.clone()),
                    || format!("{e}: merge does not rebuild {}", s.prefix.to_dsl()),
                );
                if diag2 {
                    let tracks = s.prefix.deinterleave(2);
                    out.check(tracks[0].is_prefix_of(&tracks[1]) || tracks[1].is_prefix_of(&tracks[0]), || {
                        format!("diag(2): tracks differ in {}", s.prefix.to_dsl())
                    });
                }
            }
            let n = m.min(10);
            match fixed_word_distribution(e, n, n) {
                Ok(dist) => {
                    for t in levels(e, n, &Limits::default()).expect("small").words() {
                        let c = dist.get(&t).cloned().unwrap_or_default();
                        let lhs = rational::from_big(&c) * rational::pow2(-(n as i64));
                        out.check(lhs == mu(e, &t), || {
                            format!("{e}: {} produced {c} times out of 2^{n}", t.to_dsl())
                        });
                    }
                }
                Err(err) => out.check(false, || format!("{e}: {err}")),
            }
            out
        })
        .collect();
    merge_results(Suite::Sampler, depth, results)
}

fn measure_bound(depth: usize) -> SuiteResult {
    let mut out = SuiteResult::new(Suite::MeasureBound, depth);
    for (text, c) in MEASURED {
        let e = parse(text).expect("suite expressions parse");
        match check_dagger_inequality(&e, *c, depth) {
            Ok(r) => {
                out.checks += r.checks as u64;
                for (n, m) in r.violations {
                    out.failures.push(format!("{text}: fails at n = {n}, m = {m}"));
                }
                out.check(r.margin >= rational::one(), || {
                    format!("{text}: margin {}", to_text(&r.margin))
                });
            }
            Err(err) => out.check(false, || format!("{text}: {err}")),
        }
    }
    out
}

fn merge_results(suite: Suite, depth: usize, parts: Vec<SuiteResult>) -> SuiteResult {
    let mut out = SuiteResult::new(suite, depth);
    for p in parts {
        out.absorb(p);
    }
    out
}

/// Number of sampled nodes of each length, for reporting.
pub fn level_sizes(e: &ClassExpr, depth: usize) -> Vec<BigUint> {
    level_counts(e, depth)
}
