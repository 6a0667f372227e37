use num_bigint::BigInt;

use super::*;
use crate::report::Status;

fn x(vars: usize, k: usize) -> MultiPoly {
    MultiPoly::var(vars, k)
}

/// `d_k(x_k^a x_{k+1}^b)` as a signed geometric sum.
fn closed_form(vars: usize, k: usize, exps: &[u32]) -> MultiPoly {
    let (a, b) = (exps[k - 1], exps[k]);
    let (lo, hi, sign) = if a >= b { (b, a, 1) } else { (a, b, -1) };
    let mut out = MultiPoly::zero(vars);
    for t in 0..hi - lo {
        let mut e = exps.to_vec();
        e[k - 1] = hi - 1 - t;
        e[k] = lo + t;
        out = &out + &MultiPoly::monomial(vars, e, BigInt::from(sign));
    }
    out
}

#[test]
fn demazure_examples() {
    let x1 = x(2, 1);
    let x2 = x(2, 2);
    assert_eq!(demazure(1, &x1), MultiPoly::one(2));
    assert!(demazure(1, &(&x1 * &x2)).is_zero());
    assert_eq!(demazure(1, &(&x1 * &x1)), &x1 + &x2);
}

#[test]
fn demazure_matches_closed_form_on_monomials() {
    for vars in 2..=4 {
        for e in monomials_up_to(vars, 7) {
            for k in 1..vars {
                let f = MultiPoly::monomial(vars, e.clone(), 1);
                assert_eq!(demazure(k, &f), closed_form(vars, k, &e), "{f} at {k}");
            }
        }
    }
}

#[test]
fn division_detects_non_multiples() {
    let f = &x(2, 1) + &MultiPoly::one(2);
    assert!(f.div_by_difference(1).is_none());
    let g = &x(2, 1) - &x(2, 2);
    assert_eq!(g.div_by_difference(1), Some(MultiPoly::one(2)));
}

#[test]
fn dot_slide_on_x1() {
    // x_1 d_1(x_1) - d_1(x_2 x_1) = x_1
    let f = x(2, 1);
    let lhs = &demazure(1, &f).mul_var(1) - &demazure(1, &f.mul_var(2));
    assert_eq!(lhs, f);
}

#[test]
fn braid_relation_on_x1_squared_x3() {
    let f = MultiPoly::monomial(3, vec![2, 0, 1], 1);
    let lhs = demazure(1, &demazure(2, &demazure(1, &f)));
    let rhs = demazure(2, &demazure(1, &demazure(2, &f)));
    assert_eq!(lhs, rhs);
}

#[test]
fn nilhecke_relations_hold() {
    for m in 2..=4 {
        let r = check_nilhecke(m, Samples::new(6, 20, 3)).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        assert!(r.cases > 0);
    }
    assert!(check_nilhecke(1, Samples::new(2, 0, 0)).is_err());
}

#[test]
fn klr_crossings() {
    let c = CartanData::type_a(3);
    let ii = ColoredWord::new(vec![1, 1], &c).unwrap();
    let out = klr_crossing(&c, &ii, 1, &x(2, 1)).unwrap();
    assert_eq!(out, KlrElement::single(ii, MultiPoly::one(2)));

    let ij = ColoredWord::new(vec![1, 2], &c).unwrap();
    let once = klr_crossing(&c, &ij, 1, &MultiPoly::one(2)).unwrap();
    let twice = once.cross(&c, 1).unwrap();
    assert_eq!(twice, KlrElement::single(ij.clone(), &x(2, 1) + &x(2, 2)));

    let twice = klr_crossing(&c, &ij, 1, &x(2, 1)).unwrap().cross(&c, 1).unwrap();
    let expected = &(&x(2, 1) * &x(2, 1)) + &(&x(2, 1) * &x(2, 2));
    assert_eq!(twice, KlrElement::single(ij.clone(), expected));

    let ik = ColoredWord::new(vec![1, 3], &c).unwrap();
    let f = MultiPoly::monomial(2, vec![2, 1], 5);
    let twice = klr_crossing(&c, &ik, 1, &f).unwrap().cross(&c, 1).unwrap();
    assert_eq!(twice, KlrElement::single(ik, f.clone()));

    assert!(klr_crossing(&c, &ij, 2, &f).is_err());
    assert!(ColoredWord::new(vec![4], &c).is_err());
}

#[test]
fn klr_edge_and_contrast_checks() {
    let c = CartanData::type_a(3);
    let s = Samples::new(5, 10, 11);
    for (i, j, name) in [(1, 2, "klr_edge_relation"), (2, 1, "klr_edge_relation"), (1, 3, "klr_distant_identity"), (2, 2, "klr_same_colour")] {
        let r = check_klr_edge_relation(&c, i, j, s).unwrap();
        assert_eq!(r.check, name);
        assert_eq!(r.status, Status::Pass, "{r:?}");
    }
}

#[test]
fn theorem_composite_and_control() {
    let c = CartanData::type_a(2);
    let s = Samples::new(5, 10, 1);
    let r = check_theorem6_computation(&c, s).unwrap();
    assert_eq!(r.status, Status::Pass, "{r:?}");

    let word = ColoredWord::new(vec![2, 1, 1], &c).unwrap();
    // f = 1: both sides vanish
    assert!(theorem_composite(&c, &word, &MultiPoly::one(3), None).is_zero());
    // f = x_3: both sides are -1 on the same word
    let out = theorem_composite(&c, &word, &x(3, 3), None);
    assert_eq!(out, KlrElement::single(word.clone(), MultiPoly::constant(3, -1)));

    for skip in 0..4 {
        let r = check_theorem6_computation_with(&c, 1, 2, s, Some(skip)).unwrap();
        assert_eq!(r.status, Status::Fail, "skip {skip}");
    }
    let r = check_theorem6_computation_with(&c, 1, 1, s, None).unwrap();
    assert_eq!(r.status, Status::Skipped);
}

#[test]
fn sample_set_is_deterministic() {
    let s = Samples::new(3, 5, 42);
    assert_eq!(s.polynomials(3), s.polynomials(3));
    assert_eq!(s.polynomials(3).len(), monomials_up_to(3, 3).len() + 5);
}
