use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::class::ClassExpr;
use crate::error::{Error, Result};
use crate::rational::log2_bracket;
use crate::tree::level_counts;
use crate::word::Word;

use super::branching_levels;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdRow {
    pub n: usize,
    pub theta: usize,
    pub count: BigUint,
    /// `⌊log₂ count⌋` and `⌈log₂ count⌉`; equal when the count is a power of two.
    pub log_floor: u64,
    pub log_ceil: u64,
    /// `-log₂ μ_P(X↾n)`, which is `θ` itself.
    pub neg_log_mu: usize,
}

impl ThresholdRow {
    /// `|θ - log₂ #T_P↾n| ≤ c`, decided exactly as
    /// `2^{θ-c} ≤ #T_P↾n ≤ 2^{θ+c}`.
    pub fn within(&self, c: usize) -> bool {
        let upper = BigUint::from(1u32) << (self.theta + c);
        let lower_ok = self.theta <= c || BigUint::from(1u32) << (self.theta - c) <= self.count;
        lower_ok && self.count <= upper
    }

    /// Least `c` for which [`within`](Self::within) holds.
    pub fn gap(&self) -> usize {
        let theta = self.theta as u64;
        let below = self.log_ceil.saturating_sub(theta);
        let above = theta.saturating_sub(self.log_floor);
        below.max(above) as usize
    }
}

/// Per-depth thresholds along one path prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdProfile {
    pub prefix: Word,
    pub rows: Vec<ThresholdRow>,
}

impl ThresholdProfile {
    pub fn within(&self, c: usize) -> bool {
        self.rows.iter().all(|r| r.within(c))
    }

    pub fn max_gap(&self) -> usize {
        self.rows.iter().map(ThresholdRow::gap).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "n": r.n,
                    "theta": r.theta,
                    "count": r.count.to_string(),
                    "log_floor": r.log_floor,
                    "log_ceil": r.log_ceil,
                    "neg_log_mu": r.neg_log_mu,
                })
            })
            .collect();
        json!({"prefix": self.prefix.to_dsl(), "rows": rows})
    }
}

pub fn threshold_profile(e: &ClassExpr, prefix: &Word) -> Result<ThresholdProfile> {
    let branching =
        branching_levels(e, prefix).ok_or_else(|| Error::NotExtendible(prefix.clone()))?;
    let counts = level_counts(e, prefix.len());
    let mut theta = 0;
    let mut rows = Vec::with_capacity(prefix.len() + 1);
    for (n, count) in counts.into_iter().enumerate() {
        if n > 0 && branching.bit(n - 1) {
            theta += 1;
        }
        let (log_floor, log_ceil) = log2_bracket(&count);
        rows.push(ThresholdRow {
            n,
            theta,
            count,
            log_floor,
            log_ceil,
            neg_log_mu: theta,
        });
    }
    Ok(ThresholdProfile {
        prefix: prefix.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::parse;

    #[test]
    fn full_space_thresholds_coincide() {
        let p = threshold_profile(&ClassExpr::Full, &Word::from_code(0b1011_0110, 8)).unwrap();
        for r in &p.rows {
            assert_eq!((r.theta as u64, r.log_floor, r.log_ceil), (r.n as u64, r.n as u64, r.n as u64));
        }
        assert_eq!(p.max_gap(), 0);
    }

    #[test]
    fn sft_spread_grows_along_zeros() {
        let e = parse("sft{00,01,11}").unwrap();
        let zeros = threshold_profile(&e, &Word::zeros(12)).unwrap();
        let ones = threshold_profile(&e, &Word::ones(12)).unwrap();
        assert_eq!(zeros.rows[12].theta, 12);
        assert_eq!(ones.rows[12].theta, 6);
        // 3^6 = 729 lies strictly between 2^9 and 2^10
        assert_eq!((ones.rows[12].log_floor, ones.rows[12].log_ceil), (9, 10));
    }

    #[test]
    fn within_matches_gap() {
        let e = ClassExpr::Ex3;
        let x = Word::from_code(0b1_0111_0011_1011, 13);
        let p = threshold_profile(&e, &x).unwrap();
        for r in &p.rows {
            let g = r.gap();
            assert!(r.within(g));
            if g > 0 {
                assert!(!r.within(g - 1));
            }
        }
    }
}
