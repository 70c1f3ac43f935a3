use num_bigint::BigUint;
use pitree::catalog::random_expr;
use pitree::homogeneity::{check_n_hom, check_ss, check_weak_n_hom};
use pitree::measure::{mu, ratio, theta};
use pitree::rational::from_u64;
use pitree::sampler::{merge, produce_path, split, BitSource};
use pitree::tree::{count, extensions_count, level_counts, levels, Limits};
use pitree::{parse, ClassExpr, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn expr_strategy() -> impl Strategy<Value = ClassExpr> {
    (any::<u64>(), 1usize..=6).prop_map(|(seed, size)| {
        random_expr(&mut ChaCha8Rng::seed_from_u64(seed), size)
    })
}

fn word_strategy(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(any::<bool>(), 0..=max).prop_map(Word::from_bits)
}

/// An extendible node of length `len`, steered by `bits`.
fn node(e: &ClassExpr, bits: &Word) -> Word {
    let mut w = Word::empty();
    for b in bits.iter() {
        let next = w.child(b);
        w = if e.extendible(&next) { next } else { w.child(!b) };
    }
    w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn dsl_round_trips(e in expr_strategy()) {
        prop_assert_eq!(parse(&e.to_dsl()).unwrap(), e);
    }

    #[test]
    fn counting_agrees_with_levels(e in expr_strategy(), n in 0usize..12) {
        let level = levels(&e, n, &Limits::default()).unwrap();
        prop_assert_eq!(level.cardinality(), &count(&e, n as u64, &Limits::default()).unwrap());
        prop_assert_eq!(level.cardinality(), &level_counts(&e, n)[n]);
    }

    #[test]
    fn counts_never_shrink(e in expr_strategy()) {
        let c = level_counts(&e, 14);
        for k in 1..c.len() {
            prop_assert!(c[k] >= c[k - 1]);
            prop_assert!(c[k] <= &c[k - 1] * 2u8);
        }
    }

    #[test]
    fn ratios_and_measures_split_over_children(e in expr_strategy(), steer in word_strategy(8), extra in 1usize..6) {
        let s = node(&e, &steer);
        let n = s.len() + extra;
        let (s0, s1) = (s.child(false), s.child(true));
        prop_assert_eq!(ratio(&e, &s, n).unwrap(), ratio(&e, &s0, n).unwrap() + ratio(&e, &s1, n).unwrap());
        prop_assert_eq!(mu(&e, &s), mu(&e, &s0) + mu(&e, &s1));
        let ext = |w: &Word| -> BigUint {
            if e.extendible(w) { extensions_count(&e, w, n).unwrap() } else { BigUint::default() }
        };
        prop_assert_eq!(ext(&s), ext(&s0) + ext(&s1));
    }

    #[test]
    fn theta_is_monotone_and_bounded(e in expr_strategy(), steer in word_strategy(16)) {
        let s = node(&e, &steer);
        let mut last = 0;
        for j in 0..=s.len() {
            let t = theta(&e, &s.prefix(j)).unwrap();
            prop_assert!(t >= last && t <= j);
            last = t;
        }
        prop_assert_eq!(theta(&ClassExpr::Full, &s).unwrap(), s.len());
    }

    #[test]
    fn homogeneity_notions_are_nested(e in expr_strategy(), n in 1usize..5) {
        let d = 12;
        let ss = check_ss(&e, d).holds;
        let one = check_n_hom(&e, 1, d).unwrap().holds;
        prop_assert_eq!(ss, one);
        let nhom = check_n_hom(&e, n, d).unwrap().holds;
        let weak = check_weak_n_hom(&e, n, d).unwrap().holds;
        prop_assert!(!nhom || weak);
        if ss {
            prop_assert!(nhom);
        }
    }

    #[test]
    fn produced_paths_consume_theta_bits(e in expr_strategy(), bits in word_strategy(24), n in 0usize..24) {
        let mut src = BitSource::fixed(&bits);
        match produce_path(&e, &mut src, n) {
            Ok(p) => {
                prop_assert_eq!(p.prefix.len(), n);
                prop_assert!(e.extendible(&p.prefix));
                prop_assert_eq!(theta(&e, &p.prefix).unwrap(), p.bits_consumed);
                prop_assert_eq!(src.consumed() as usize, p.bits_consumed);
                prop_assert_eq!(merge(&p.branches, &p.tossed, &p.forced).unwrap(), p.prefix.clone());
                let (r, f) = split(&p.branches, &p.prefix).unwrap();
                prop_assert_eq!((r, f), (p.tossed.clone(), p.forced.clone()));
            }
            Err(_) => prop_assert!(bits.len() < n),
        }
    }

    #[test]
    fn interleave_round_trips(a in word_strategy(20), b in word_strategy(20)) {
        let m = a.len().min(b.len());
        let (a, b) = (a.prefix(m), b.prefix(m));
        let t = Word::interleave(&a, &b).deinterleave(2);
        prop_assert_eq!(&t[0], &a);
        prop_assert_eq!(&t[1], &b);
    }
}

#[test]
fn fast_counting_matches_the_layered_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for size in 1..=4 {
        let e = random_expr(&mut rng, size);
        let layered = level_counts(&e, 2060);
        for n in [2049u64, 2053, 2060] {
            assert_eq!(count(&e, n, &Limits::default()).unwrap(), layered[n as usize], "{e} at {n}");
        }
    }
    let ex3 = ClassExpr::Ex3;
    assert_eq!(count(&ex3, 4001, &Limits::default()).unwrap(), BigUint::from(1u8) << 2001);
    assert_eq!(mu(&ex3, &Word::empty()), from_u64(1));
}
