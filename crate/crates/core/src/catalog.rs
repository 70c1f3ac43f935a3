//! Named expressions used by the verification suites, and a seeded
//! generator of random compositions.

use rand::Rng;

use crate::class::{parse, ClassExpr};
use crate::word::Word;

/// Built-in expressions exercised by every suite.
pub const BUILTINS: &[&str] = &[
    "full",
    "ex3",
    "ex6",
    "ahomdiag",
    "sft{00,11}",
    "sft{00,01,11}",
    "sep(0,3;1)",
    "point(01(10)*)",
    "diag(2)",
    "diag(3)",
    "union(cyl(00,full),cyl(1,full))",
    "dsum(full,point(0*))",
    "prod(full,sft{00,11})",
];

/// Separating classes, all s.s.-homogeneous.
pub const SEPARATIONS: &[&str] = &["sep(0,3;1)", "sep(;)", "sep(1,2,5;0,4)", "sep(0;1)"];

/// Classes with an exact measure and a `c` with `λ(P) > 2^{-c}`.
pub const MEASURED: &[(&str, usize)] = &[
    ("full", 1),
    ("union(cyl(00,full),cyl(1,full))", 1),
    ("sep(0,3;1)", 4),
];

const LEAVES: &[&str] = &[
    "full",
    "point(0*)",
    "point(1(01)*)",
    "sft{00,11}",
    "sft{00,01,11}",
    "sep(0;1)",
    "sep(1,2;0)",
    "diag(2)",
    "ex3",
    "ex6",
];

pub fn builtins() -> Vec<ClassExpr> {
    BUILTINS
        .iter()
        .map(|s| parse(s).expect("built-in expressions parse"))
        .collect()
}

/// A random expression with at most `size` constructors.
pub fn random_expr<R: Rng>(rng: &mut R, size: usize) -> ClassExpr {
    if size <= 1 || rng.gen_bool(0.3) {
        let leaf = LEAVES[rng.gen_range(0..LEAVES.len())];
        return parse(leaf).expect("leaf expressions parse");
    }
    let kind = if size == 2 { 3 } else { rng.gen_range(0..4) };
    if kind == 3 {
        let len = rng.gen_range(0..=2);
        let p = Word::from_code(rng.gen_range(0..1u64 << len), len);
        return ClassExpr::cyl(p, random_expr(rng, size - 1));
    }
    let left_size = rng.gen_range(1..=size - 2);
    let a = random_expr(rng, left_size);
    let b = random_expr(rng, size - 1 - left_size);
    match kind {
        0 => ClassExpr::prod(a, b),
        1 => ClassExpr::dsum(a, b),
        _ => ClassExpr::union(a, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn builtins_parse_and_round_trip() {
        for (text, e) in BUILTINS.iter().zip(builtins()) {
            assert_eq!(parse(&e.to_dsl()).unwrap(), e, "{text}");
        }
    }

    #[test]
    fn random_sizes_are_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let size = rng.gen_range(1..=6);
            assert!(random_expr(&mut rng, size).size() <= size.max(1));
        }
    }
}
