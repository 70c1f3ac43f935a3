//! Exact rationals and the few helpers the measure code needs.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type ExactRational = num_rational::BigRational;

/// `num / den` from natural counts. `den` must be nonzero.
pub fn ratio(num: &BigUint, den: &BigUint) -> ExactRational {
    ExactRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub fn from_u64(n: u64) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n))
}

pub fn from_big(n: &BigUint) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n.clone()))
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i64) -> ExactRational {
    let p = BigInt::one() << k.unsigned_abs() as usize;
    if k >= 0 {
        ExactRational::from_integer(p)
    } else {
        ExactRational::new(BigInt::one(), p)
    }
}

pub fn zero() -> ExactRational {
    ExactRational::zero()
}

pub fn one() -> ExactRational {
    ExactRational::one()
}

/// Text form `p/q`, or `p` for integers.
pub fn to_text(r: &ExactRational) -> String {
    r.to_string()
}

/// Floor and ceiling of `log2 n` for `n ≥ 1`.
pub fn log2_bracket(n: &BigUint) -> (u64, u64) {
    assert!(!n.is_zero(), "log of zero");
    let floor = n.bits() - 1;
    let exact = n.trailing_zeros() == Some(floor);
    (floor, if exact { floor } else { floor + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2(3), from_u64(8));
        assert_eq!(pow2(-2), ExactRational::new(1.into(), 4.into()));
        assert_eq!(pow2(0), one());
    }

    #[test]
    fn brackets() {
        assert_eq!(log2_bracket(&BigUint::from(1u32)), (0, 0));
        assert_eq!(log2_bracket(&BigUint::from(8u32)), (3, 3));
        assert_eq!(log2_bracket(&BigUint::from(9u32)), (3, 4));
        assert_eq!(log2_bracket(&BigUint::from(729u32)), (9, 10));
    }

    #[test]
    fn text() {
        assert_eq!(to_text(&ratio(&2u32.into(), &10u32.into())), "1/5");
        assert_eq!(to_text(&from_u64(3)), "3");
    }
}
