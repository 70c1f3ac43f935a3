//! Finite-depth checks of the homogeneity notions and of the lemmas that
//! relate them.
//!
//! Every check runs over cells of equal automaton state, so a level with
//! millions of nodes costs as much as its number of distinct states. All
//! verdicts mean "holds up to the checked depth". A failure witness found
//! at one depth stays a witness at every larger depth.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;
use serde_json::{json, Value};

use crate::class::{ClassExpr, State};
use crate::error::{Error, Result};
use crate::rational::{self, to_text, ExactRational};
use crate::tree::{by_state, counts_from, layers, level_counts};
use crate::word::Word;

/// Distinct states of each level `0 ..= depth` with their least node and
/// number of nodes, in node order.
fn state_levels(e: &ClassExpr, depth: usize) -> Vec<Vec<(State, Word, BigUint)>> {
    layers(e, depth).iter().map(by_state).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SsWitness {
    pub sigma: Word,
    pub tau: Word,
    pub bit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SsVerdict {
    pub depth: usize,
    pub holds: bool,
    pub witness: Option<SsWitness>,
}

impl SsVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "ok": self.holds,
            "depth": self.depth,
            "witness": self.witness.as_ref().map(|w| json!({
                "sigma": w.sigma.to_dsl(),
                "tau": w.tau.to_dsl(),
                "i": w.bit as u8,
            })),
        })
    }
}

/// All same-length nodes up to `depth` have the same children. On failure
/// the witness pairs the least node of the first bad level with the least
/// node whose children differ from it.
pub fn check_ss(e: &ClassExpr, depth: usize) -> SsVerdict {
    let levels = state_levels(e, depth);
    for cells in &levels[..depth] {
        let pattern = |s: &State| e.children(s).map(|c| c.is_some());
        let first = pattern(&cells[0].0);
        if let Some((s, rep, _)) = cells.iter().find(|(s, _, _)| pattern(s) != first) {
            let bit = first[0] == pattern(s)[0];
            return SsVerdict {
                depth,
                holds: false,
                witness: Some(SsWitness {
                    sigma: cells[0].1.clone(),
                    tau: rep.clone(),
                    bit,
                }),
            };
        }
    }
    SsVerdict {
        depth,
        holds: true,
        witness: None,
    }
}

/// Length-`n` continuations from a state, in lexicographic order.
fn continuations(e: &ClassExpr, state: &State, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack = vec![(state.clone(), Word::empty())];
    while let Some((s, w)) = stack.pop() {
        if w.len() == n {
            out.push(w);
            continue;
        }
        let [c0, c1] = e.children(&s);
        if let Some(c) = c1 {
            stack.push((c, w.child(true)));
        }
        if let Some(c) = c0 {
            stack.push((c, w.child(false)));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NHomWitness {
    pub sigma0: Word,
    pub sigma1: Word,
    /// Least extension of exactly one of the two nodes.
    pub tau: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NHomVerdict {
    pub n: usize,
    pub depth: usize,
    pub holds: bool,
    pub witness: Option<NHomWitness>,
}

impl NHomVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "ok": self.holds,
            "depth": self.depth,
            "witness": self.witness.as_ref().map(|w| json!({
                "sigma0": w.sigma0.to_dsl(),
                "sigma1": w.sigma1.to_dsl(),
                "tau": w.tau.to_dsl(),
            })),
        })
    }
}

/// Nodes of each length `nk` share their sets of length-`n` extensions,
/// for every band ending by `depth`.
pub fn check_n_hom(e: &ClassExpr, n: usize, depth: usize) -> Result<NHomVerdict> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let levels = state_levels(e, depth);
    let mut level = 0;
    while level + n <= depth {
        let cells = &levels[level];
        let first = continuations(e, &cells[0].0, n);
        for (s, rep, _) in &cells[1..] {
            let other = continuations(e, s, n);
            if other != first {
                let tau = first
                    .iter()
                    .filter(|t| other.binary_search(t).is_err())
                    .chain(other.iter().filter(|t| first.binary_search(t).is_err()))
                    .min()
                    .expect("sets differ")
                    .clone();
                return Ok(NHomVerdict {
                    n,
                    depth,
                    holds: false,
                    witness: Some(NHomWitness {
                        sigma0: cells[0].1.clone(),
                        sigma1: rep.clone(),
                        tau,
                    }),
                });
            }
        }
        level += n;
    }
    Ok(NHomVerdict {
        n,
        depth,
        holds: true,
        witness: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakWitness {
    pub sigma0: Word,
    pub sigma1: Word,
    pub count0: BigUint,
    pub count1: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakVerdict {
    pub n: usize,
    /// Level of the first band start.
    pub offset: usize,
    pub depth: usize,
    pub holds: bool,
    /// `counts[k]`: the common number of extensions from level
    /// `offset + nk` to `offset + n(k+1)`, for the bands that agreed.
    pub counts: Vec<BigUint>,
    pub witness: Option<WeakWitness>,
}

impl WeakVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "offset": self.offset,
            "ok": self.holds,
            "depth": self.depth,
            "c": self.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "witness": self.witness.as_ref().map(|w| json!({
                "sigma0": w.sigma0.to_dsl(),
                "sigma1": w.sigma1.to_dsl(),
                "count0": w.count0.to_string(),
                "count1": w.count1.to_string(),
            })),
        })
    }
}

/// Nodes of each length `nk` have equally many extensions of length
/// `n(k+1)`.
pub fn check_weak_n_hom(e: &ClassExpr, n: usize, depth: usize) -> Result<WeakVerdict> {
    check_weak_bands(e, n, 0, depth)
}

/// Weak homogeneity over the shifted bands `offset + nk .. offset + n(k+1)`.
/// With offset 1 this is the "almost weak" property of disjoint sums.
pub fn check_weak_bands(
    e: &ClassExpr,
    n: usize,
    offset: usize,
    depth: usize,
) -> Result<WeakVerdict> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let levels = state_levels(e, depth);
    let mut counts = Vec::new();
    let mut level = offset;
    while level + n <= depth {
        let cells = &levels[level];
        let ext = |s: &State| counts_from(e, s, n).pop().expect("n+1 entries");
        let first = ext(&cells[0].0);
        for (s, rep, _) in &cells[1..] {
            let other = ext(s);
            if other != first {
                return Ok(WeakVerdict {
                    n,
                    offset,
                    depth,
                    holds: false,
                    counts,
                    witness: Some(WeakWitness {
                        sigma0: cells[0].1.clone(),
                        sigma1: rep.clone(),
                        count0: first,
                        count1: other,
                    }),
                });
            }
        }
        counts.push(first);
        level += n;
    }
    Ok(WeakVerdict {
        n,
        offset,
        depth,
        holds: true,
        counts,
        witness: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AHomReport {
    pub depth: usize,
    /// `(min θ, max θ)` per level.
    pub per_level: Vec<(usize, usize)>,
    /// Largest spread `max θ - min θ` over all levels.
    pub constant: usize,
    /// The spread reached by half the depth was not exceeded later.
    pub bounded_trend: bool,
}

impl AHomReport {
    pub fn spread(&self, level: usize) -> usize {
        let (lo, hi) = self.per_level[level];
        hi - lo
    }

    pub fn to_json(&self) -> Value {
        json!({
            "c": self.constant,
            "bounded_trend": self.bounded_trend,
            "per_level": self.per_level.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        })
    }
}

pub fn a_hom_constant(e: &ClassExpr, depth: usize) -> AHomReport {
    let per_level: Vec<(usize, usize)> = layers(e, depth)
        .iter()
        .map(|layer| {
            let lo = layer.iter().map(|c| c.theta).min().expect("nonempty");
            let hi = layer.iter().map(|c| c.theta).max().expect("nonempty");
            (lo, hi)
        })
        .collect();
    let spread = |r: &[(usize, usize)]| r.iter().map(|(a, b)| b - a).max().unwrap_or(0);
    let constant = spread(&per_level);
    let bounded_trend = spread(&per_level[..=depth / 2]) == constant;
    AHomReport {
        depth,
        per_level,
        constant,
        bounded_trend,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VlConstants {
    pub depth: usize,
    /// Largest `#T_{P∩⟦σ⟧}↾k · #T_P↾n / #T_P↾k` over `n < k ≤ depth` and
    /// `σ ∈ T_P↾n`.
    pub dagger: ExactRational,
    /// Largest reciprocal of the same quantity.
    pub ddagger: ExactRational,
}

impl VlConstants {
    pub fn to_json(&self) -> Value {
        json!({"dagger": to_text(&self.dagger), "ddagger": to_text(&self.ddagger)})
    }
}

pub fn vl_constants(e: &ClassExpr, depth: usize) -> VlConstants {
    let totals = level_counts(e, depth);
    let levels = state_levels(e, depth);
    let mut dagger = rational::one();
    let mut ddagger = rational::one();
    for (n, cells) in levels.iter().enumerate() {
        for (s, _, _) in cells {
            let ext = counts_from(e, s, depth - n);
            for k in n + 1..=depth {
                let q = rational::ratio(&(&ext[k - n] * &totals[n]), &totals[k]);
                let inv = rational::one() / &q;
                if q > dagger {
                    dagger = q;
                }
                if inv > ddagger {
                    ddagger = inv;
                }
            }
        }
    }
    VlConstants {
        depth,
        dagger,
        ddagger,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchViolation {
    pub sigma: Word,
    pub n: usize,
    pub ell: usize,
    pub extensions: BigUint,
    /// `"at-least"` or `"exactly"`.
    pub clause: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchLemmaReport {
    pub depth: usize,
    /// `(node class, length)` pairs examined.
    pub checks: usize,
    /// Checks where every extension had the same `θ`.
    pub equality_checks: usize,
    pub violations: Vec<BranchViolation>,
}

impl BranchLemmaReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// If all extensions of `σ` at length `n` gain at least `ℓ` branchings,
/// there are at least `2^ℓ` of them, and exactly `2^ℓ` when they all gain
/// exactly `ℓ`.
pub fn verify_branch_lemma(e: &ClassExpr, depth: usize) -> BranchLemmaReport {
    let mut report = BranchLemmaReport {
        depth,
        checks: 0,
        equality_checks: 0,
        violations: Vec::new(),
    };
    for (m, cells) in state_levels(e, depth).iter().enumerate() {
        for (s, rep, _) in cells {
            let mut layer: HashMap<(State, usize), BigUint> =
                HashMap::from([((s.clone(), 0), BigUint::one())]);
            for n in m..=depth {
                let lo = layer.keys().map(|k| k.1).min().expect("no dead ends");
                let hi = layer.keys().map(|k| k.1).max().expect("no dead ends");
                let total: BigUint = layer.values().sum();
                let bound = BigUint::one() << lo;
                report.checks += 1;
                if total < bound {
                    report.violations.push(BranchViolation {
                        sigma: rep.clone(),
                        n,
                        ell: lo,
                        extensions: total.clone(),
                        clause: "at-least",
                    });
                }
                if lo == hi {
                    report.equality_checks += 1;
                    if total != bound {
                        report.violations.push(BranchViolation {
                            sigma: rep.clone(),
                            n,
                            ell: lo,
                            extensions: total,
                            clause: "exactly",
                        });
                    }
                }
                if n < depth {
                    let mut next: HashMap<(State, usize), BigUint> = HashMap::new();
                    for ((st, gained), mult) in &layer {
                        let children = e.children(st);
                        let both = children.iter().all(Option::is_some) as usize;
                        for child in children.into_iter().flatten() {
                            *next.entry((child, gained + both)).or_default() += mult;
                        }
                    }
                    layer = next;
                }
            }
        }
    }
    report
}

/// Hypotheses whose consequences [`verify_implications`] checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// Weakly `m`-homogeneous.
    Weak(usize),
    /// a-homogeneous with constant `c`.
    AHom(usize),
    Ss,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicationCheck {
    pub name: &'static str,
    pub bound: String,
    pub observed: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicationReport {
    pub hypothesis: Hypothesis,
    pub depth: usize,
    pub checks: Vec<ImplicationCheck>,
}

impl ImplicationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "bound": c.bound, "observed": c.observed, "ok": c.holds}))
            .collect();
        json!({"hypothesis": format!("{:?}", self.hypothesis), "depth": self.depth, "checks": checks})
    }
}

fn bounded(name: &'static str, value: &ExactRational, bound: &ExactRational) -> ImplicationCheck {
    ImplicationCheck {
        name,
        bound: to_text(bound),
        observed: to_text(value),
        holds: value <= bound,
    }
}

/// Checks the consequences of a homogeneity hypothesis after establishing
/// the hypothesis itself to `depth`.
pub fn verify_implications(
    e: &ClassExpr,
    hypothesis: Hypothesis,
    depth: usize,
) -> Result<ImplicationReport> {
    let mut checks = Vec::new();
    match hypothesis {
        Hypothesis::Weak(m) => {
            let weak = check_weak_n_hom(e, m, depth)?;
            if !weak.holds {
                return Err(Error::HypothesisNotEstablished(format!(
                    "not weakly {m}-homogeneous to depth {depth}"
                )));
            }
            let vl = vl_constants(e, depth);
            let bound = rational::pow2(2 * m as i64);
            checks.push(bounded("vl-dagger", &vl.dagger, &bound));
            checks.push(bounded("vl-ddagger", &vl.ddagger, &bound));
        }
        Hypothesis::AHom(c) => {
            let ahom = a_hom_constant(e, depth);
            if ahom.constant > c {
                return Err(Error::HypothesisNotEstablished(format!(
                    "theta spread {} exceeds {c} by depth {depth}",
                    ahom.constant
                )));
            }
            let c_log = log_gap(e, depth);
            checks.push(ImplicationCheck {
                name: "log-bound",
                bound: c.to_string(),
                observed: c_log.to_string(),
                holds: c_log <= c,
            });
            checks.push(ImplicationCheck {
                name: "log-bound-converse",
                bound: format!("{} <= 2*{c_log}", ahom.constant),
                observed: ahom.constant.to_string(),
                holds: ahom.constant <= 2 * c_log,
            });
            let vl = vl_constants(e, depth);
            let bound = rational::pow2(4 * c as i64);
            checks.push(bounded("vl-dagger", &vl.dagger, &bound));
            checks.push(bounded("vl-ddagger", &vl.ddagger, &bound));
        }
        Hypothesis::Ss => {
            if !check_ss(e, depth).holds {
                return Err(Error::HypothesisNotEstablished(format!(
                    "not s.s.-homogeneous to depth {depth}"
                )));
            }
            let totals = level_counts(e, depth);
            let mut count_ok = true;
            let mut ratio_ok = true;
            for (n, layer) in layers(e, depth).iter().enumerate() {
                for cell in layer {
                    count_ok &= totals[n] == BigUint::one() << cell.theta;
                    let ext = counts_from(e, &cell.state, depth - n);
                    let target = rational::pow2(-(cell.theta as i64));
                    for k in n..=depth {
                        ratio_ok &= rational::ratio(&ext[k - n], &totals[k]) == target;
                    }
                }
            }
            checks.push(ImplicationCheck {
                name: "count-is-2^theta",
                bound: "equality".into(),
                observed: count_ok.to_string(),
                holds: count_ok,
            });
            checks.push(ImplicationCheck {
                name: "ratio-is-2^-theta",
                bound: "equality".into(),
                observed: ratio_ok.to_string(),
                holds: ratio_ok,
            });
            let ahom = a_hom_constant(e, depth);
            checks.push(ImplicationCheck {
                name: "theta-spread",
                bound: "0".into(),
                observed: ahom.constant.to_string(),
                holds: ahom.constant == 0,
            });
        }
    }
    Ok(ImplicationReport {
        hypothesis,
        depth,
        checks,
    })
}

/// Least `c` with `|θ(σ) - log₂ #T_P↾n| ≤ c` for all nodes to `depth`.
pub fn log_gap(e: &ClassExpr, depth: usize) -> usize {
    let totals = level_counts(e, depth);
    let mut gap = 0;
    for (n, layer) in layers(e, depth).iter().enumerate() {
        let (lo, hi) = rational::log2_bracket(&totals[n]);
        for cell in layer {
            let t = cell.theta as u64;
            gap = gap.max(hi.saturating_sub(t)).max(t.saturating_sub(lo));
        }
    }
    gap as usize
}

/// All five notions at one depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneityReport {
    pub depth: usize,
    pub ss: SsVerdict,
    pub nhom: NHomVerdict,
    pub weak: WeakVerdict,
    pub ahom: AHomReport,
    pub vl: VlConstants,
}

impl HomogeneityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "depth": self.depth,
            "ss": self.ss.to_json(),
            "nhom": self.nhom.to_json(),
            "weak": self.weak.to_json(),
            "ahom": self.ahom.to_json(),
            "vl": self.vl.to_json(),
        })
    }
}

pub fn homogeneity_report(e: &ClassExpr, n: usize, depth: usize) -> Result<HomogeneityReport> {
    Ok(HomogeneityReport {
        depth,
        ss: check_ss(e, depth),
        nhom: check_n_hom(e, n, depth)?,
        weak: check_weak_n_hom(e, n, depth)?,
        ahom: a_hom_constant(e, depth),
        vl: vl_constants(e, depth),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::parse;
    use crate::word::w;

    #[test]
    fn ss_classification() {
        assert!(check_ss(&ClassExpr::Full, 12).holds);
        assert!(check_ss(&parse("sep(0,3;1)").unwrap(), 12).holds);
        let v = check_ss(&parse("sft{00,01,11}").unwrap(), 12);
        assert!(!v.holds);
        assert_eq!(
            v.witness,
            Some(SsWitness {
                sigma: w("0"),
                tau: w("1"),
                bit: false
            })
        );
    }

    #[test]
    fn n_hom_classification() {
        let sft = parse("sft{00,01,11}").unwrap();
        assert!(check_n_hom(&sft, 2, 12).unwrap().holds);
        assert!(check_weak_n_hom(&sft, 2, 12).unwrap().holds);
        let weak = check_weak_n_hom(&ClassExpr::Ex3, 4, 24).unwrap();
        assert!(weak.holds);
        assert_eq!(weak.counts[0], BigUint::from(6u32));
        assert!(weak.counts[1..].iter().all(|c| *c == BigUint::from(4u32)));
        assert!(!check_n_hom(&ClassExpr::Ex3, 4, 24).unwrap().holds);
    }

    #[test]
    fn ahomdiag_diagonalises() {
        let e = ClassExpr::AHomDiag;
        let a = a_hom_constant(&e, 20);
        assert_eq!(a.constant, 1);
        for n in 2..=5 {
            let v = check_weak_n_hom(&e, n, 20.max(n * n)).unwrap();
            assert!(!v.holds, "n = {n}");
        }
    }

    #[test]
    fn sft_spread_grows() {
        let sft = parse("sft{00,01,11}").unwrap();
        for n in 1..=6 {
            assert_eq!(a_hom_constant(&sft, 2 * n).constant, n);
        }
        assert!(!a_hom_constant(&sft, 12).bounded_trend);
        assert_eq!(a_hom_constant(&ClassExpr::Full, 10).constant, 0);
    }

    #[test]
    fn vl_examples() {
        let full = vl_constants(&ClassExpr::Full, 10);
        assert_eq!((full.dagger.clone(), full.ddagger.clone()), (rational::one(), rational::one()));
        let ex3 = vl_constants(&ClassExpr::Ex3, 12);
        assert!(ex3.dagger <= rational::pow2(8) && ex3.ddagger <= rational::pow2(8));
        let iso = parse("dsum(full,point(0*))").unwrap();
        let small = vl_constants(&iso, 8).ddagger;
        let large = vl_constants(&iso, 14).ddagger;
        assert!(large >= rational::pow2(12));
        assert!(small < large);
    }

    #[test]
    fn branch_lemma_holds() {
        for text in ["full", "ex3", "ahomdiag", "ex6", "sft{00,01,11}"] {
            let r = verify_branch_lemma(&parse(text).unwrap(), 12);
            assert!(r.ok(), "{text}: {:?}", r.violations.first());
            assert!(r.equality_checks > 0);
        }
    }

    #[test]
    fn implications() {
        let r = verify_implications(&ClassExpr::Ex3, Hypothesis::Weak(4), 20).unwrap();
        assert!(r.ok(), "{:?}", r.checks);
        let r = verify_implications(&ClassExpr::AHomDiag, Hypothesis::AHom(1), 20).unwrap();
        assert!(r.ok(), "{:?}", r.checks);
        let r = verify_implications(&parse("sep(0,3;1)").unwrap(), Hypothesis::Ss, 14).unwrap();
        assert!(r.ok());
        assert!(matches!(
            verify_implications(&ClassExpr::Ex3, Hypothesis::Ss, 8),
            Err(Error::HypothesisNotEstablished(_))
        ));
    }

    #[test]
    fn shifted_bands_on_a_disjoint_sum() {
        let v = check_weak_bands(&ClassExpr::Ex3, 16, 1, 33).unwrap();
        assert!(v.holds);
        assert_eq!(v.counts, vec![BigUint::from(256u32), BigUint::from(256u32)]);
    }
}
