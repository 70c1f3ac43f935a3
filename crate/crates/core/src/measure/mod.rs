//! Branching counts, the induced measure and exact relative-measure ratios.

mod lambda;
mod threshold;

use num_bigint::BigUint;

use crate::class::ClassExpr;
use crate::error::{Error, Result};
use crate::rational::{self, ExactRational};
use crate::tree::{count_from, extensions_count};
use crate::word::Word;

pub use lambda::{
    dsum_lambda, lambda_exact, lambda_exact_with, lambda_report, raw_ratio, raw_ratio_series,
    subclass_series, Candidate, Certificate, DsumReport, LambdaReport, Limit, RatioSeries,
    SubclassReport, DEFAULT_WINDOW, SS_CERT_DEPTH,
};
pub use threshold::{threshold_profile, ThresholdProfile, ThresholdRow};

/// `θ_P(σ)`: the number of nonempty prefixes of `σ` whose sibling is
/// extendible.
pub fn theta(e: &ClassExpr, sigma: &Word) -> Result<usize> {
    let mut state = e.start();
    let mut theta = 0;
    for bit in sigma.iter() {
        let [c0, c1] = e.children(&state);
        let both = c0.is_some() && c1.is_some();
        let next = if bit { c1 } else { c0 };
        state = next.ok_or_else(|| Error::NotExtendible(sigma.clone()))?;
        theta += both as usize;
    }
    Ok(theta)
}

/// Branching indicator along `σ`: entry `j` is true when the sibling of
/// `σ↾(j+1)` is extendible. `None` off the tree.
pub fn branching_levels(e: &ClassExpr, sigma: &Word) -> Option<Word> {
    let mut state = e.start();
    let mut out = Word::empty();
    for bit in sigma.iter() {
        let [c0, c1] = e.children(&state);
        out.push(c0.is_some() && c1.is_some());
        state = if bit { c1 } else { c0 }?;
    }
    Some(out)
}

/// `μ_P(σ) = 2^{-θ_P(σ)}` on the tree and 0 elsewhere.
pub fn mu(e: &ClassExpr, sigma: &Word) -> ExactRational {
    match theta(e, sigma) {
        Ok(t) => rational::pow2(-(t as i64)),
        Err(_) => rational::zero(),
    }
}

/// The map `φ` sending an arbitrary word to the node reached by following
/// its bits at branching nodes and the forced child elsewhere.
pub fn phi_map(e: &ClassExpr, sigma: &Word) -> Word {
    let mut state = e.start();
    let mut out = Word::empty();
    for bit in sigma.iter() {
        let [c0, c1] = e.children(&state);
        let (b, next) = match (c0, c1) {
            (Some(a), Some(b)) => {
                if bit {
                    (true, b)
                } else {
                    (false, a)
                }
            }
            (Some(a), None) => (false, a),
            (None, Some(b)) => (true, b),
            (None, None) => unreachable!("reachable states have a child"),
        };
        out.push(b);
        state = next;
    }
    out
}

/// `#T_{P∩⟦σ⟧}↾n / #T_P↾n`; zero when `σ` is off the tree.
pub fn ratio(e: &ClassExpr, sigma: &Word, n: usize) -> Result<ExactRational> {
    if n < sigma.len() {
        return Err(Error::Precondition(format!(
            "depth {n} is shorter than the node {}",
            sigma.to_dsl()
        )));
    }
    let total = count_from(e, &e.start(), n as u64);
    match extensions_count(e, sigma, n) {
        Ok(part) => Ok(rational::ratio(&part, &total)),
        Err(Error::NotExtendible(_)) => Ok(rational::zero()),
        Err(err) => Err(err),
    }
}

/// `#T_P↾n` is a power of two exactly when this returns its exponent.
pub fn exact_log2(n: &BigUint) -> Option<u64> {
    let (lo, hi) = rational::log2_bracket(n);
    (lo == hi).then_some(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::parse;
    use crate::rational::{from_u64, pow2};
    use crate::word::w;

    fn q(a: u64, b: u64) -> ExactRational {
        from_u64(a) / from_u64(b)
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&ClassExpr::Full, &w("0110")).unwrap(), 4);
        let sft = parse("sft{00,11}").unwrap();
        assert_eq!(theta(&sft, &w("001100")).unwrap(), 3);
        for j in 0..5 {
            for m in 1..5 {
                let x = Word::zeros(j).concat(&Word::ones(m));
                assert_eq!(theta(&ClassExpr::Ex6, &x).unwrap(), j + 1);
            }
        }
        assert!(theta(&ClassExpr::Ex6, &w("10")).is_err());
    }

    #[test]
    fn mu_examples() {
        for k in 0..10 {
            assert_eq!(mu(&ClassExpr::Ex6, &Word::zeros(k)), pow2(-(k as i64)));
        }
        let u = parse("union(cyl(00,full),cyl(1,full))").unwrap();
        assert_eq!(mu(&u, &w("00")), q(1, 2));
        assert_eq!(mu(&u, &w("10")), q(1, 4));
        assert_eq!(mu(&u, &w("11")), q(1, 4));
        assert_eq!(mu(&u, &w("01")), q(0, 1));
    }

    #[test]
    fn phi_examples() {
        let sft = parse("sft{00,01,11}").unwrap();
        assert_eq!(phi_map(&sft, &w("10")), w("11"));
        assert_eq!(phi_map(&sft, &w("11")), w("11"));
        assert_eq!(phi_map(&ClassExpr::Full, &w("0110")), w("0110"));
        let p = parse("point(0*)").unwrap();
        assert_eq!(phi_map(&p, &w("1011")), w("0000"));
    }

    #[test]
    fn ratio_examples() {
        for n in 0..8 {
            assert_eq!(ratio(&ClassExpr::Ex3, &w("0"), 4 * n + 1).unwrap(), q(1, 2));
            assert_eq!(ratio(&ClassExpr::Ex3, &w("0"), 4 * n + 3).unwrap(), q(1, 5));
        }
        assert_eq!(ratio(&ClassExpr::Ex6, &w("10"), 5).unwrap(), q(0, 1));
        assert!(ratio(&ClassExpr::Full, &w("10"), 1).is_err());
    }

    #[test]
    fn branching_indicator() {
        assert_eq!(branching_levels(&ClassExpr::Ex6, &w("0011")).unwrap(), w("1110"));
        assert!(branching_levels(&ClassExpr::Ex6, &w("10")).is_none());
    }
}
