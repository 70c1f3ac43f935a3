//! Finite-depth evidence for limiting relative measures.
//!
//! A ratio series is reported as evidence only. An exact value is claimed
//! only when a certificate from the structure of the expression applies.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::class::{ClassExpr, RawTree};
use crate::error::{Error, Result};
use crate::homogeneity::check_ss;
use crate::rational::{self, to_text, ExactRational};
use crate::tree::{extension_counts, level_counts, raw_extensions_count, raw_levels};
use crate::word::Word;

use super::theta;

/// Number of equal trailing values that count as a stable series.
pub const DEFAULT_WINDOW: usize = 8;
/// Depth to which s.s.-homogeneity is verified before its measure formula
/// is used as a certificate.
pub const SS_CERT_DEPTH: usize = 16;

/// Exact ratios indexed by depth with running extremes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioSeries {
    start: usize,
    values: Vec<ExactRational>,
    inf: ExactRational,
    sup: ExactRational,
    window: usize,
}

impl RatioSeries {
    /// `values[i]` belongs to depth `start + i`. Panics on an empty series.
    pub fn new(start: usize, values: Vec<ExactRational>, window: usize) -> Self {
        assert!(!values.is_empty(), "a ratio series needs at least one value");
        let inf = values.iter().min().expect("nonempty").clone();
        let sup = values.iter().max().expect("nonempty").clone();
        RatioSeries {
            start,
            values,
            inf,
            sup,
            window: window.max(1),
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.start + self.values.len() - 1
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn values(&self) -> &[ExactRational] {
        &self.values
    }

    pub fn at(&self, n: usize) -> Option<&ExactRational> {
        n.checked_sub(self.start).and_then(|i| self.values.get(i))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &ExactRational)> {
        self.values.iter().enumerate().map(move |(i, r)| (self.start + i, r))
    }

    pub fn inf(&self) -> &ExactRational {
        &self.inf
    }

    pub fn sup(&self) -> &ExactRational {
        &self.sup
    }

    pub fn last(&self) -> &ExactRational {
        self.values.last().expect("nonempty")
    }

    /// The last `window` values are identical.
    pub fn is_stable(&self) -> bool {
        self.values.len() >= self.window
            && self.values[self.values.len() - self.window..]
                .iter()
                .all(|v| v == self.last())
    }

    pub fn stable_value(&self) -> Option<&ExactRational> {
        self.is_stable().then(|| self.last())
    }

    /// Every entry from depth `n` on equals `value`.
    pub fn constant_from(&self, n: usize, value: &ExactRational) -> bool {
        self.entries().filter(|(m, _)| *m >= n).all(|(_, v)| v == value)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|p| p[1] <= p[0])
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|p| p[0] <= p[1])
    }

    /// Heuristic sign of divergence to infinity: the trailing window is
    /// strictly increasing and the last value is at least `2^window`.
    pub fn looks_unbounded(&self) -> bool {
        let w = self.window;
        self.values.len() > w
            && self.values[self.values.len() - w - 1..]
                .windows(2)
                .all(|p| p[0] < p[1])
            && *self.last() >= rational::pow2(w as i64)
    }

    pub fn to_json(&self) -> Value {
        let series: Vec<Value> = self
            .entries()
            .map(|(n, r)| json!({"n": n, "num": r.numer().to_string(), "den": r.denom().to_string()}))
            .collect();
        json!({
            "series": series,
            "inf": to_text(&self.inf),
            "sup": to_text(&self.sup),
            "stable": self.is_stable(),
            "window": self.window,
        })
    }

    /// `n,numerator,denominator` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,num,den\n");
        for (n, r) in self.entries() {
            out.push_str(&format!("{n},{},{}\n", r.numer(), r.denom()));
        }
        out
    }
}

/// Why an exact limiting relative measure is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    OffTree,
    Full,
    Point,
    /// Constant per-block counts of a block shift.
    BlockCounts,
    Product(Box<Certificate>, Box<Certificate>),
    /// s.s.-homogeneity verified to the given depth.
    SsVerified(usize),
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::OffTree => write!(f, "off-tree"),
            Certificate::Full => write!(f, "full"),
            Certificate::Point => write!(f, "point"),
            Certificate::BlockCounts => write!(f, "block-counts"),
            Certificate::Product(a, b) => write!(f, "product({a},{b})"),
            Certificate::SsVerified(d) => write!(f, "ss-verified-to-depth-{d}"),
        }
    }
}

/// Exact `λ_P(σ)` when a certificate applies, with s.s.-homogeneity
/// verified to [`SS_CERT_DEPTH`].
pub fn lambda_exact(e: &ClassExpr, sigma: &Word) -> Option<(ExactRational, Certificate)> {
    lambda_exact_with(e, sigma, SS_CERT_DEPTH)
}

pub fn lambda_exact_with(
    e: &ClassExpr,
    sigma: &Word,
    ss_depth: usize,
) -> Option<(ExactRational, Certificate)> {
    if !e.extendible(sigma) {
        return Some((rational::zero(), Certificate::OffTree));
    }
    match e {
        ClassExpr::Full => Some((rational::pow2(-(sigma.len() as i64)), Certificate::Full)),
        ClassExpr::Point(_) => Some((rational::one(), Certificate::Point)),
        ClassExpr::Sft(blocks) => {
            let b = blocks.block_len();
            let size = BigUint::from(blocks.blocks().len());
            let full = sigma.len() / b;
            let partial = sigma.suffix_from(full * b);
            let value = if partial.is_empty() {
                rational::ratio(&BigUint::one(), &size.pow(full as u32))
            } else {
                let done = BigUint::from(blocks.completions(&partial));
                rational::ratio(&done, &size.pow(full as u32 + 1))
            };
            Some((value, Certificate::BlockCounts))
        }
        ClassExpr::Prod(left, right) => {
            let tracks = sigma.deinterleave(2);
            let (l, cl) = lambda_exact_with(left, &tracks[0], ss_depth)?;
            let (r, cr) = lambda_exact_with(right, &tracks[1], ss_depth)?;
            Some((l * r, Certificate::Product(Box::new(cl), Box::new(cr))))
        }
        _ => {
            let depth = ss_depth.max(sigma.len());
            if check_ss(e, depth).holds {
                let t = theta(e, sigma).expect("extendible");
                Some((rational::pow2(-(t as i64)), Certificate::SsVerified(depth)))
            } else {
                None
            }
        }
    }
}

/// Ratio series of `σ` with an optional exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaReport {
    pub sigma: Word,
    pub series: RatioSeries,
    pub exact: Option<ExactRational>,
    pub certificate: Option<Certificate>,
}

impl LambdaReport {
    /// When both an exact value and a stable series exist, whether they
    /// agree.
    pub fn consistent(&self) -> Option<bool> {
        let exact = self.exact.as_ref()?;
        let stable = self.series.stable_value()?;
        Some(exact == stable)
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.series.to_json();
        v["sigma"] = json!(self.sigma.to_dsl());
        v["exact"] = json!(self.exact.as_ref().map(to_text));
        v["certificate"] = json!(self.certificate.as_ref().map(|c| c.to_string()));
        v
    }
}

fn ratio_series(e: &ClassExpr, sigma: &Word, max_depth: usize, window: usize) -> RatioSeries {
    let start = sigma.len();
    let totals = level_counts(e, max_depth.max(start));
    let parts = extension_counts(e, sigma, max_depth.max(start))
        .unwrap_or_else(|_| vec![BigUint::zero(); max_depth.max(start) - start + 1]);
    let values = parts
        .iter()
        .zip(&totals[start..])
        .map(|(p, t)| rational::ratio(p, t))
        .collect();
    RatioSeries::new(start, values, window)
}

pub fn lambda_report(
    e: &ClassExpr,
    sigma: &Word,
    max_depth: usize,
    window: usize,
) -> Result<LambdaReport> {
    if max_depth < sigma.len() + window {
        return Err(Error::Precondition(format!(
            "depth {max_depth} leaves fewer than {window} ratios after the node {}",
            sigma.to_dsl()
        )));
    }
    let series = ratio_series(e, sigma, max_depth, window);
    let (exact, certificate) = match lambda_exact(e, sigma) {
        Some((v, c)) => (Some(v), Some(c)),
        None => (None, None),
    };
    Ok(LambdaReport {
        sigma: sigma.clone(),
        series,
        exact,
        certificate,
    })
}

/// Limit evidence for `#T_{P0}↾n / #T_{P1}↾n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Limit {
    Finite(ExactRational),
    Infinite,
}

/// A closed form for `λ_{P0⊕P1}(i⌢σ)` in terms of `λ_{P_i}(σ)` and `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub name: &'static str,
    pub formula: &'static str,
    pub value: Option<ExactRational>,
    /// Agreement with the stable brute-force series, when both exist.
    pub matches: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DsumReport {
    pub side: bool,
    pub sigma: Word,
    /// Ratios of `side⌢σ` inside the disjoint sum.
    pub series: RatioSeries,
    /// `#T_{P0}↾n / #T_{P1}↾n`.
    pub count_ratio: RatioSeries,
    pub limit: Option<Limit>,
    /// `λ_{P_side}(σ)`, exact or from a stable component series.
    pub component: Option<ExactRational>,
    pub candidates: Vec<Candidate>,
}

impl DsumReport {
    /// Name of the first candidate agreeing with the series.
    pub fn matched(&self) -> Option<&'static str> {
        self.candidates
            .iter()
            .find(|c| c.matches == Some(true))
            .map(|c| c.name)
    }

    pub fn to_json(&self) -> Value {
        let candidates: Vec<Value> = self
            .candidates
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "formula": c.formula,
                    "value": c.value.as_ref().map(to_text),
                    "matches": c.matches,
                })
            })
            .collect();
        let limit = match &self.limit {
            Some(Limit::Finite(r)) => json!(to_text(r)),
            Some(Limit::Infinite) => json!("inf"),
            None => Value::Null,
        };
        json!({
            "side": self.side as u8,
            "sigma": self.sigma.to_dsl(),
            "series": self.series.to_json(),
            "count_ratio": self.count_ratio.to_json(),
            "limit": limit,
            "component": self.component.as_ref().map(to_text),
            "candidates": candidates,
            "matched": self.matched(),
        })
    }
}

pub fn dsum_lambda(
    left: &ClassExpr,
    right: &ClassExpr,
    side: bool,
    sigma: &Word,
    max_depth: usize,
    window: usize,
) -> Result<DsumReport> {
    if max_depth < sigma.len() + 1 + window {
        return Err(Error::Precondition(format!(
            "depth {max_depth} leaves fewer than {window} ratios"
        )));
    }
    let sum = ClassExpr::dsum(left.clone(), right.clone());
    let node = Word::empty().child(side).concat(sigma);
    let series = ratio_series(&sum, &node, max_depth, window);

    let lc = level_counts(left, max_depth);
    let rc = level_counts(right, max_depth);
    let count_ratio = RatioSeries::new(
        0,
        lc.iter().zip(&rc).map(|(a, b)| rational::ratio(a, b)).collect(),
        window,
    );
    let limit = if let Some(v) = count_ratio.stable_value() {
        Some(Limit::Finite(v.clone()))
    } else if count_ratio.looks_unbounded() {
        Some(Limit::Infinite)
    } else {
        None
    };

    let comp_expr = if side { right } else { left };
    let component = match lambda_exact(comp_expr, sigma) {
        Some((v, _)) => Some(v),
        None => ratio_series(comp_expr, sigma, max_depth - 1, window)
            .stable_value()
            .cloned(),
    };

    let corrected = candidate_value(component.as_ref(), limit.as_ref(), side, false);
    let printed = candidate_value(component.as_ref(), limit.as_ref(), side, true);
    let judge = |v: &Option<ExactRational>| match (v, series.stable_value()) {
        (Some(v), Some(s)) => Some(v == s),
        _ => None,
    };
    let candidates = vec![
        Candidate {
            name: "corrected",
            formula: if side { "lambda/(L+1)" } else { "lambda*L/(L+1)" },
            matches: judge(&corrected),
            value: corrected,
        },
        Candidate {
            name: "printed",
            formula: if side { "lambda/(2(L+1))" } else { "lambda*L/(2(L+1))" },
            matches: judge(&printed),
            value: printed,
        },
    ];
    Ok(DsumReport {
        side,
        sigma: sigma.clone(),
        series,
        count_ratio,
        limit,
        component,
        candidates,
    })
}

fn candidate_value(
    component: Option<&ExactRational>,
    limit: Option<&Limit>,
    side: bool,
    halved: bool,
) -> Option<ExactRational> {
    let lambda = component?.clone();
    let scale = if halved {
        ExactRational::new(1.into(), 2.into())
    } else {
        rational::one()
    };
    let value = match limit? {
        Limit::Finite(l) => {
            let share = if side {
                rational::one() / (l + rational::one())
            } else {
                l / (l + rational::one())
            };
            lambda * share
        }
        Limit::Infinite => {
            if side {
                rational::zero()
            } else {
                lambda
            }
        }
    };
    Some(value * scale)
}

/// Counts of a subclass relative to the class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubclassReport {
    pub series: RatioSeries,
    /// Set when the outer class passed the s.s. check to the series depth;
    /// then the series must be nonincreasing.
    pub nonincreasing: Option<bool>,
}

impl SubclassReport {
    pub fn to_json(&self) -> Value {
        let mut v = self.series.to_json();
        v["nonincreasing"] = json!(self.nonincreasing);
        v
    }
}

/// `#T_Q↾n / #T_P↾n` for `n ≤ max_depth`, after checking `T_Q ⊆ T_P` to
/// that depth.
pub fn subclass_series(
    outer: &ClassExpr,
    inner: &ClassExpr,
    max_depth: usize,
    window: usize,
) -> Result<SubclassReport> {
    if let Some(witness) = subset_witness(outer, inner, max_depth) {
        return Err(Error::NotSubclass(witness));
    }
    let p = level_counts(outer, max_depth);
    let q = level_counts(inner, max_depth);
    let series = RatioSeries::new(
        0,
        q.iter().zip(&p).map(|(a, b)| rational::ratio(a, b)).collect(),
        window,
    );
    let nonincreasing = check_ss(outer, max_depth)
        .holds
        .then(|| series.is_nonincreasing());
    Ok(SubclassReport {
        series,
        nonincreasing,
    })
}

/// Least word in `T_Q` but not in `T_P`, up to `depth`.
fn subset_witness(outer: &ClassExpr, inner: &ClassExpr, depth: usize) -> Option<Word> {
    use std::collections::HashSet;
    let mut seen = HashSet::new();
    let mut layer = vec![(inner.start(), outer.start(), Word::empty())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (q, p, rep) in &layer {
            for bit in [false, true] {
                let Some(q2) = inner.step(q, bit) else { continue };
                let child = rep.child(bit);
                let Some(p2) = outer.step(p, bit) else {
                    return Some(child);
                };
                if seen.insert((q2.clone(), p2.clone(), child.len())) {
                    next.push((q2, p2, child));
                }
            }
        }
        layer = next;
    }
    None
}

/// `#{τ ∈ T↾n : σ ⪯ τ} / #T↾n` over a raw tree.
pub fn raw_ratio(t: &RawTree, sigma: &Word, n: usize) -> Result<ExactRational> {
    let total = raw_levels(t, n)?;
    if total.is_empty() {
        return Ok(rational::zero());
    }
    let part = raw_extensions_count(t, sigma, n)?;
    Ok(rational::ratio(&part, total.cardinality()))
}

pub fn raw_ratio_series(
    t: &RawTree,
    sigma: &Word,
    max_depth: usize,
    window: usize,
) -> Result<RatioSeries> {
    let values = (sigma.len()..=max_depth)
        .map(|n| raw_ratio(t, sigma, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(RatioSeries::new(sigma.len(), values, window))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::parse;
    use crate::rational::from_u64;
    use crate::word::w;

    fn q(a: u64, b: u64) -> ExactRational {
        from_u64(a) / from_u64(b)
    }

    #[test]
    fn ex3_series_oscillates() {
        let r = lambda_report(&ClassExpr::Ex3, &w("0"), 40, 8).unwrap();
        assert!(!r.series.is_stable());
        assert!(*r.series.inf() <= q(1, 5));
        assert!(*r.series.sup() >= q(1, 2));
        assert!(r.exact.is_none());
    }

    #[test]
    fn sft_series_is_constant() {
        let e = parse("sft{00,01,11}").unwrap();
        for s in ["00", "01", "11"] {
            let r = lambda_report(&e, &w(s), 24, 8).unwrap();
            assert!(r.series.constant_from(2, &q(1, 3)), "{s}");
            assert_eq!(r.exact, Some(q(1, 3)));
            assert_eq!(r.consistent(), Some(true));
        }
    }

    #[test]
    fn exact_values() {
        let sep = parse("sep(0;1)").unwrap();
        let (v, c) = lambda_exact(&sep, &w("1011")).unwrap();
        assert_eq!(v, q(1, 4));
        assert!(matches!(c, Certificate::SsVerified(_)));
        let sft = parse("sft{00,01,11}").unwrap();
        assert_eq!(lambda_exact(&sft, &w("000111")).unwrap().0, q(1, 27));
        assert_eq!(lambda_exact(&sft, &w("0")).unwrap().0, q(2, 3));
        let prod = parse("prod(full,sft{00,11})").unwrap();
        let x = Word::interleave(&w("101"), &w("001"));
        assert_eq!(lambda_exact(&prod, &x).unwrap().0, q(1, 32));
        assert!(lambda_exact(&ClassExpr::Ex3, &w("0")).is_none());
    }

    #[test]
    fn dsum_of_full_spaces() {
        let r = dsum_lambda(&ClassExpr::Full, &ClassExpr::Full, false, &Word::empty(), 20, 8)
            .unwrap();
        assert_eq!(r.limit, Some(Limit::Finite(q(1, 1))));
        assert_eq!(r.series.stable_value(), Some(&q(1, 2)));
        assert_eq!(r.matched(), Some("corrected"));
        assert_eq!(r.candidates[1].value, Some(q(1, 4)));
        assert_eq!(r.candidates[1].matches, Some(false));
    }

    #[test]
    fn dsum_with_isolated_point() {
        let p = parse("point(0*)").unwrap();
        let r = dsum_lambda(&ClassExpr::Full, &p, false, &Word::empty(), 30, 8).unwrap();
        assert_eq!(r.limit, Some(Limit::Infinite));
        assert!(r.series.is_nondecreasing());
        assert_eq!(r.series.at(11), Some(&q(1024, 1025)));
    }

    #[test]
    fn subclass_examples() {
        let r = subclass_series(&ClassExpr::Full, &parse("cyl(00,full)").unwrap(), 12, 8).unwrap();
        assert_eq!(r.nonincreasing, Some(true));
        assert!(r.series.constant_from(2, &q(1, 4)));
        let sft = parse("sft{00,11}").unwrap();
        let r = subclass_series(&sft, &parse("point(0*)").unwrap(), 12, 4).unwrap();
        assert_eq!(r.series.at(12), Some(&q(1, 64)));
        assert!(matches!(
            subclass_series(&sft, &ClassExpr::Full, 4, 2),
            Err(Error::NotSubclass(x)) if x == w("01")
        ));
    }

    #[test]
    fn ladder_ratio() {
        let t = RawTree::ladder(40);
        for n in 1..=15 {
            assert_eq!(raw_ratio(&t, &w("0"), 2 * n).unwrap(), q(1, n as u64 + 2));
        }
    }
}
