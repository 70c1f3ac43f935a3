//! Lebesgue measure of classes at finite depth: upper bounds from level
//! counts, exact values for a small algebra of certified expressions, and
//! the branching-window argument behind density.

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::class::ClassExpr;
use crate::error::{Error, Result};
use crate::measure::branching_levels;
use crate::rational::{self, to_text, ExactRational};
use crate::tree::{count_from, extensions_count, level_counts};
use crate::word::Word;

/// Depth beyond which membership no longer constrains bits, for clopen
/// expressions.
pub fn clopen_depth(e: &ClassExpr) -> Option<usize> {
    match e {
        ClassExpr::Full => Some(0),
        ClassExpr::Sep(s) => Some(s.bound()),
        ClassExpr::Cyl(p, body) => Some(p.len() + clopen_depth(body)?),
        ClassExpr::Union(a, b) => Some(clopen_depth(a)?.max(clopen_depth(b)?)),
        ClassExpr::DSum(a, b) => Some(1 + clopen_depth(a)?.max(clopen_depth(b)?)),
        ClassExpr::Prod(a, b) => Some(2 * clopen_depth(a)?.max(clopen_depth(b)?)),
        ClassExpr::Diag(n) if n.get() == 1 => Some(0),
        ClassExpr::Sft(s) if s.blocks().len() == 1 << s.block_len() => Some(0),
        _ => None,
    }
}

/// Exact `λ(P ∩ ⟦σ⟧)` when certified.
pub fn exact_cylinder_measure(e: &ClassExpr, sigma: &Word) -> Option<ExactRational> {
    if !e.extendible(sigma) {
        return Some(rational::zero());
    }
    if let Some(d) = clopen_depth(e) {
        let depth = d.max(sigma.len());
        let part = extensions_count(e, sigma, depth).expect("extendible");
        return Some(rational::from_big(&part) * rational::pow2(-(depth as i64)));
    }
    let cyl = || rational::pow2(-(sigma.len() as i64));
    match e {
        ClassExpr::Point(_) | ClassExpr::Ex3 | ClassExpr::Ex6 => Some(rational::zero()),
        ClassExpr::Diag(_) | ClassExpr::Sft(_) => Some(rational::zero()),
        ClassExpr::Prod(a, b) => {
            let t = sigma.deinterleave(2);
            Some(exact_cylinder_measure(a, &t[0])? * exact_cylinder_measure(b, &t[1])?)
        }
        ClassExpr::DSum(a, b) => {
            let half = rational::pow2(-1);
            if sigma.is_empty() {
                let sum = exact_cylinder_measure(a, sigma)? + exact_cylinder_measure(b, sigma)?;
                Some(sum * half)
            } else {
                let rest = sigma.suffix_from(1);
                let side = if sigma.bit(0) { b } else { a };
                Some(exact_cylinder_measure(side, &rest)? * half)
            }
        }
        ClassExpr::Cyl(p, body) => {
            let scale = rational::pow2(-(p.len() as i64));
            if sigma.is_prefix_of(p) {
                Some(exact_cylinder_measure(body, &Word::empty())? * scale)
            } else {
                Some(exact_cylinder_measure(body, &sigma.suffix_from(p.len()))? * scale)
            }
        }
        ClassExpr::Union(a, b) => {
            let ma = exact_cylinder_measure(a, sigma);
            let mb = exact_cylinder_measure(b, sigma);
            match (ma, mb) {
                (Some(x), Some(y)) if y == rational::zero() => Some(x),
                (Some(x), Some(y)) if x == rational::zero() => Some(y),
                _ => None,
            }
        }
        ClassExpr::Full => Some(cyl()),
        _ => None,
    }
}

pub fn exact_measure(e: &ClassExpr) -> Option<ExactRational> {
    exact_cylinder_measure(e, &Word::empty())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureBounds {
    /// `bounds[n] = 2^{-n} #T_P↾n`, nonincreasing.
    pub bounds: Vec<ExactRational>,
    pub exact: Option<ExactRational>,
}

impl MeasureBounds {
    pub fn to_json(&self) -> Value {
        let bounds: Vec<Value> = self
            .bounds
            .iter()
            .enumerate()
            .map(|(n, b)| json!({"n": n, "upper": to_text(b), "certified": false}))
            .collect();
        json!({
            "bounds": bounds,
            "exact": self.exact.as_ref().map(to_text),
            "certified": self.exact.is_some(),
        })
    }
}

pub fn measure_bounds(e: &ClassExpr, depth: usize) -> MeasureBounds {
    let bounds = level_counts(e, depth)
        .iter()
        .enumerate()
        .map(|(n, c)| rational::from_big(c) * rational::pow2(-(n as i64)))
        .collect();
    MeasureBounds {
        bounds,
        exact: exact_measure(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaggerReport {
    pub c: usize,
    pub depth: usize,
    pub measure: ExactRational,
    /// Pairs `(n, m)` with `n + m ≤ depth` checked.
    pub checks: usize,
    /// Least `#T↾(n+m) / (2^{m-c} #T↾n)`; at least 1 when the inequality holds.
    pub margin: ExactRational,
    pub violations: Vec<(usize, usize)>,
}

impl DaggerReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "c": self.c,
            "depth": self.depth,
            "measure": to_text(&self.measure),
            "checks": self.checks,
            "margin": to_text(&self.margin),
            "violations": self.violations,
        })
    }
}

/// `#T_P↾(n+m) ≥ 2^{m-c} #T_P↾n` for all `n + m ≤ depth`, given a
/// certificate that `λ(P) > 2^{-c}`.
pub fn check_dagger_inequality(e: &ClassExpr, c: usize, depth: usize) -> Result<DaggerReport> {
    let measure = exact_measure(e)
        .ok_or_else(|| Error::NoCertificate(format!("no exact measure for {e}")))?;
    if measure <= rational::pow2(-(c as i64)) {
        return Err(Error::NoCertificate(format!(
            "measure {} is not above 2^-{c}",
            to_text(&measure)
        )));
    }
    let counts = level_counts(e, depth);
    let mut margin: Option<ExactRational> = None;
    let mut violations = Vec::new();
    let mut checks = 0;
    for n in 0..=depth {
        for m in 0..=depth - n {
            let rhs = rational::from_big(&counts[n]) * rational::pow2(m as i64 - c as i64);
            let q = rational::from_big(&counts[n + m]) / rhs;
            if q < rational::one() {
                violations.push((n, m));
            }
            if margin.as_ref().is_none_or(|x| q < *x) {
                margin = Some(q);
            }
            checks += 1;
        }
    }
    Ok(DaggerReport {
        c,
        depth,
        measure,
        checks,
        margin: margin.expect("at least one pair"),
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityRow {
    pub j: usize,
    /// `2^j · 2^{-depth} #{τ ∈ T↾depth : X↾j ⪯ τ}`.
    pub upper: ExactRational,
    /// `2^j λ(P ∩ ⟦X↾j⟧)` when certified.
    pub exact: Option<ExactRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityProfile {
    pub prefix: Word,
    pub depth: usize,
    pub rows: Vec<DensityRow>,
}

impl DensityProfile {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "j": r.j,
                    "upper": to_text(&r.upper),
                    "exact": r.exact.as_ref().map(to_text),
                    "certified": r.exact.is_some(),
                })
            })
            .collect();
        json!({"prefix": self.prefix.to_dsl(), "depth": self.depth, "rows": rows})
    }
}

/// Conditional measures `λ(P ∩ ⟦X↾j⟧) / 2^{-j}` along a prefix, bounded
/// from the counts at `depth` and exact when certified.
pub fn density_profile(e: &ClassExpr, prefix: &Word, depth: usize) -> Result<DensityProfile> {
    if !e.extendible(prefix) {
        return Err(Error::NotExtendible(prefix.clone()));
    }
    let depth = depth.max(prefix.len());
    let mut rows = Vec::with_capacity(prefix.len() + 1);
    let mut state = e.start();
    for j in 0..=prefix.len() {
        let node = prefix.prefix(j);
        let ext: BigUint = count_from(e, &state, (depth - j) as u64);
        let upper = rational::from_big(&ext) * rational::pow2(j as i64 - depth as i64);
        let exact = exact_cylinder_measure(e, &node).map(|m| m * rational::pow2(j as i64));
        rows.push(DensityRow { j, upper, exact });
        if j < prefix.len() {
            state = e.step(&state, prefix.bit(j)).expect("extendible");
        }
    }
    Ok(DensityProfile {
        prefix: prefix.clone(),
        depth,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WindowVerdict {
    /// Every window contains a branching level.
    Holds,
    /// A window without branching, where the density ratio at its start is
    /// not certified above `2^{-k}`.
    HypothesisNotMet { window_start: usize },
    /// A window without branching although the certified density ratio at
    /// its start exceeds `2^{-k}`. This contradicts a theorem.
    Violation { window_start: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchWindowReport {
    pub k: usize,
    pub start: usize,
    pub verdict: WindowVerdict,
    /// Sliding windows examined.
    pub windows: usize,
    /// Disjoint windows `[start + ik, start + (i+1)k)` holding a branching
    /// level; `θ` along the prefix is at least this.
    pub disjoint_branching: usize,
}

impl BranchWindowReport {
    pub fn to_json(&self) -> Value {
        let verdict = match &self.verdict {
            WindowVerdict::Holds => json!({"kind": "holds"}),
            WindowVerdict::HypothesisNotMet { window_start } => {
                json!({"kind": "hypothesis-not-met", "window_start": window_start})
            }
            WindowVerdict::Violation { window_start } => {
                json!({"kind": "violation", "window_start": window_start})
            }
        };
        json!({
            "k": self.k,
            "start": self.start,
            "verdict": verdict,
            "windows": self.windows,
            "disjoint_branching": self.disjoint_branching,
        })
    }
}

/// Every run of `k` consecutive levels past `start` along the prefix
/// contains a level whose sibling is extendible.
pub fn check_branch_window(
    e: &ClassExpr,
    prefix: &Word,
    k: usize,
    start: usize,
) -> Result<BranchWindowReport> {
    let branching =
        branching_levels(e, prefix).ok_or_else(|| Error::NotExtendible(prefix.clone()))?;
    if k == 0 || start + k > prefix.len() {
        return Err(Error::Precondition(format!(
            "need 1 <= k and start + k <= {}",
            prefix.len()
        )));
    }
    let has_branch = |s: usize| (s..s + k).any(|j| branching.bit(j));
    let threshold = rational::pow2(-(k as i64));
    let mut verdict = WindowVerdict::Holds;
    let mut windows = 0;
    for s in start..=prefix.len() - k {
        windows += 1;
        if !has_branch(s) {
            let certified = exact_cylinder_measure(e, &prefix.prefix(s))
                .map(|m| m * rational::pow2(s as i64))
                .is_some_and(|r| r > threshold);
            verdict = if certified {
                WindowVerdict::Violation { window_start: s }
            } else {
                WindowVerdict::HypothesisNotMet { window_start: s }
            };
            break;
        }
    }
    let disjoint_branching = (0..(prefix.len() - start) / k)
        .filter(|i| has_branch(start + i * k))
        .count();
    Ok(BranchWindowReport {
        k,
        start,
        verdict,
        windows,
        disjoint_branching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::parse;
    use crate::measure::theta;
    use crate::word::w;

    fn q(a: u64, b: u64) -> ExactRational {
        rational::from_u64(a) / rational::from_u64(b)
    }

    #[test]
    fn measure_examples() {
        let full = measure_bounds(&ClassExpr::Full, 8);
        assert!(full.bounds.iter().all(|b| *b == rational::one()));
        assert_eq!(full.exact, Some(rational::one()));
        let u = parse("union(cyl(00,full),cyl(1,full))").unwrap();
        assert_eq!(measure_bounds(&u, 8).exact, Some(q(3, 4)));
        let sft = measure_bounds(&parse("sft{00,11}").unwrap(), 12);
        assert_eq!(sft.bounds[12], q(1, 64));
        assert_eq!(sft.exact, Some(rational::zero()));
    }

    #[test]
    fn measures_compose() {
        let a = parse("sep(0;2)").unwrap();
        let b = parse("union(cyl(00,full),cyl(1,full))").unwrap();
        let ma = exact_measure(&a).unwrap();
        let mb = exact_measure(&b).unwrap();
        assert_eq!(exact_measure(&ClassExpr::prod(a.clone(), b.clone())), Some(&ma * &mb));
        assert_eq!(
            exact_measure(&ClassExpr::dsum(a, b)),
            Some((ma + mb) * rational::pow2(-1))
        );
        let half = parse("dsum(full,point(0*))").unwrap();
        assert_eq!(exact_measure(&half), Some(q(1, 2)));
        assert_eq!(exact_measure(&ClassExpr::AHomDiag), None);
    }

    #[test]
    fn dagger_inequality() {
        assert!(check_dagger_inequality(&ClassExpr::Full, 1, 16).unwrap().ok());
        let u = parse("union(cyl(00,full),cyl(1,full))").unwrap();
        assert!(check_dagger_inequality(&u, 1, 16).unwrap().ok());
        assert!(matches!(
            check_dagger_inequality(&parse("sft{00,11}").unwrap(), 3, 8),
            Err(Error::NoCertificate(_))
        ));
    }

    #[test]
    fn density_examples() {
        let p = density_profile(&ClassExpr::Full, &w("0110"), 10).unwrap();
        assert!(p.rows.iter().all(|r| r.upper == rational::one()));
        let u = parse("union(cyl(00,full),cyl(1,full))").unwrap();
        let p = density_profile(&u, &w("000101"), 12).unwrap();
        assert!(p.rows[2..].iter().all(|r| r.exact == Some(rational::one())));
        let sft = parse("sft{00,11}").unwrap();
        let p = density_profile(&sft, &Word::zeros(8), 12).unwrap();
        assert!(p.rows.iter().all(|r| r.exact == Some(rational::zero())));
    }

    #[test]
    fn windows() {
        let r = check_branch_window(&ClassExpr::Full, &w("0110100"), 1, 0).unwrap();
        assert_eq!(r.verdict, WindowVerdict::Holds);
        let u = parse("union(cyl(00,full),cyl(1,full))").unwrap();
        let r = check_branch_window(&u, &w("00101101"), 3, 2).unwrap();
        assert_eq!(r.verdict, WindowVerdict::Holds);
        let p = parse("point(0*)").unwrap();
        let r = check_branch_window(&p, &Word::zeros(10), 3, 0).unwrap();
        assert_eq!(r.verdict, WindowVerdict::HypothesisNotMet { window_start: 0 });
    }

    #[test]
    fn theta_dominates_branching_windows() {
        let e = ClassExpr::Ex3;
        let x = Word::from_code(0b1_0111_0011_1011, 13);
        for k in 1..5 {
            for start in 0..=13 - k {
                let r = check_branch_window(&e, &x, k, start).unwrap();
                assert!(theta(&e, &x).unwrap() >= r.disjoint_branching);
                assert!(!matches!(r.verdict, WindowVerdict::Violation { .. }));
            }
        }
    }
}
