use decat::qalg::{bar_involution, evaluate_at_one, qbinom, qfact, qint, LaurentPoly};
use num_bigint::BigInt;
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-6i64..=6, -5i64..=5), 0..6).prop_map(|terms| LaurentPoly::from_terms(terms.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

/// `[n]` as a plain sum `q^{n-1} + q^{n-3} + ... + q^{1-n}`.
fn oracle_qint(n: i64) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    for k in 0..n {
        p += &LaurentPoly::monomial(1, n - 1 - 2 * k);
    }
    p
}

proptest! {
    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        prop_assert_eq!(&a * &LaurentPoly::one(), a);
    }

    #[test]
    fn bar_is_ring_involution(a in poly(), b in poly()) {
        prop_assert_eq!(bar_involution(&bar_involution(&a)), a.clone());
        prop_assert_eq!(bar_involution(&(&a * &b)), &bar_involution(&a) * &bar_involution(&b));
    }

    #[test]
    fn display_round_trip(a in poly()) {
        let back: LaurentPoly = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn exact_division_recovers_factor(a in poly(), b in poly()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
    }

    #[test]
    fn qint_matches_sum(n in 0i64..12) {
        prop_assert_eq!(qint(n), oracle_qint(n));
    }

    #[test]
    fn qbinom_pascal(n in 1i64..12, k in 1i64..11) {
        prop_assume!(k < n);
        // [n k] = q^{-k} [n-1 k] + q^{n-k} [n-1 k-1]
        let rhs = &qbinom(n - 1, k).shift(-k) + &qbinom(n - 1, k - 1).shift(n - k);
        prop_assert_eq!(qbinom(n, k), rhs);
    }

    #[test]
    fn qbinom_from_factorials(n in 0u32..10, k in 0u32..10) {
        prop_assume!(k <= n);
        let lhs = &(&qbinom(n as i64, k as i64) * &qfact(k)) * &qfact(n - k);
        prop_assert_eq!(lhs, qfact(n));
    }

    #[test]
    fn qbinom_is_bar_invariant_and_counts_subsets(n in 0i64..12, k in 0i64..12) {
        prop_assume!(k <= n);
        let b = qbinom(n, k);
        prop_assert!(b.is_bar_invariant());
        let mut binom = BigInt::from(1);
        for t in 0..k {
            binom = binom * (n - t) / (t + 1);
        }
        prop_assert_eq!(evaluate_at_one(&b), binom);
    }
}
