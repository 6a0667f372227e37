//! Exact arithmetic in `Z[q, q^-1]`: q-integers, q-factorials, q-binomials and
//! the graded dimensions of projective-space and Grassmannian cohomology.
//!
//! Decategorification convention: a bigraded shift `[a]{b}` contributes
//! `(-1)^a q^b` to a class in the Grothendieck group.

mod laurent;
mod rational;

pub use laurent::LaurentPoly;
pub use rational::RationalFunction;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QalgError {
    #[error("cannot parse Laurent polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("cohomology of P^{0} is undefined (need n >= -1)")]
    NegativeProjectiveSpace(i64),
    #[error("inexact division computing {what}")]
    InexactDivision { what: String },
}

/// The q-integer `[n] = q^(n-1) + q^(n-3) + ... + q^(1-n)`, with `[0] = 0` and
/// `[-n] = -[n]`.
pub fn qint(n: i64) -> LaurentPoly {
    if n < 0 {
        return -qint(-n);
    }
    LaurentPoly::from_terms((0..n).map(|k| (n - 1 - 2 * k, 1)))
}

/// `[1][2]...[n]`.
pub fn qfact(n: u32) -> LaurentPoly {
    (1..=n as i64).fold(LaurentPoly::one(), |acc, k| &acc * &qint(k))
}

/// Gaussian binomial `[n choose k]`; zero outside `0 <= k <= n`.
pub fn qbinom(n: i64, k: i64) -> LaurentPoly {
    try_qbinom(n, k).expect("q-factorial quotient must be exact")
}

/// Like [`qbinom`] but surfaces an inexact division instead of panicking.
pub fn try_qbinom(n: i64, k: i64) -> Result<LaurentPoly, QalgError> {
    if k < 0 || k > n {
        return Ok(LaurentPoly::zero());
    }
    let den = &qfact(k as u32) * &qfact((n - k) as u32);
    qfact(n as u32)
        .div_exact(&den)
        .ok_or_else(|| QalgError::InexactDivision {
            what: format!("qbinom({n},{k})"),
        })
}

/// `[n choose k]` extended to every integer `n` by
/// `[n][n-1]...[n-k+1] / [k]!`; for `n < 0` this is
/// `(-1)^k [k - n - 1 choose k]`. Zero for `k < 0`.
pub fn qbinom_general(n: i64, k: i64) -> LaurentPoly {
    if n >= 0 || k < 0 {
        return qbinom(n, k);
    }
    let magnitude = qbinom(k - n - 1, k);
    if k % 2 == 1 {
        -magnitude
    } else {
        magnitude
    }
}

/// Graded dimension of `H*(P^n)`; `H*(P^-1) = 0`.
pub fn gdim_proj(n: i64) -> Result<LaurentPoly, QalgError> {
    if n < -1 {
        return Err(QalgError::NegativeProjectiveSpace(n));
    }
    Ok(qint(n + 1))
}

/// Graded dimension of `H*(G(k, n))`, the Grassmannian of `k`-planes in `C^n`.
pub fn gdim_grassmannian(k: i64, n: i64) -> LaurentPoly {
    qbinom(n, k)
}

pub fn bar_involution(p: &LaurentPoly) -> LaurentPoly {
    p.bar()
}

pub fn evaluate_at_one(p: &LaurentPoly) -> BigInt {
    p.eval_at_one()
}

/// Class of the shift `[a]{b}`: `(-1)^a q^b`.
pub fn decat_shift(cohomological: i64, equivariant: i64) -> LaurentPoly {
    LaurentPoly::signed_power(cohomological.rem_euclid(2) == 1, equivariant)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn qint_values() {
        assert_eq!(qint(2), lp("q + q^-1"));
        assert_eq!(qint(0), LaurentPoly::zero());
        assert_eq!(qint(1), LaurentPoly::one());
        assert_eq!(qint(-3), -qint(3));
        for n in 0..10 {
            assert_eq!(evaluate_at_one(&qint(n)), BigInt::from(n));
        }
    }

    #[test]
    fn qfact_values() {
        assert_eq!(qfact(0), LaurentPoly::one());
        assert_eq!(qfact(2), lp("q + q^-1"));
        // Expanded by hand: (q + q^-1)(q^2 + 1 + q^-2).
        assert_eq!(qfact(3), lp("q^3 + 2*q + 2*q^-1 + q^-3"));
    }

    #[test]
    fn qbinom_values() {
        assert_eq!(qbinom(3, 1), lp("q^2 + 1 + q^-2"));
        for n in 0..8 {
            assert_eq!(qbinom(n, 0), LaurentPoly::one());
            assert_eq!(qbinom(n, n + 1), LaurentPoly::zero());
        }
        assert_eq!(qbinom(4, 2), lp("q^4 + q^2 + 2 + q^-2 + q^-4"));
        assert_eq!(evaluate_at_one(&qbinom(4, 2)), BigInt::from(6));
        assert_eq!(qbinom(3, -1), LaurentPoly::zero());
        assert_eq!(qbinom(-2, 1), LaurentPoly::zero());
    }

    #[test]
    fn general_binomial_matches_falling_product() {
        for n in -6..6i64 {
            for k in 0..5i64 {
                let mut num = LaurentPoly::one();
                for s in 0..k {
                    num = &num * &qint(n - s);
                }
                let expected = num.div_exact(&qfact(k as u32)).unwrap();
                assert_eq!(qbinom_general(n, k), expected, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn projective_space() {
        assert_eq!(gdim_proj(1).unwrap(), lp("q + q^-1"));
        assert_eq!(gdim_proj(-1).unwrap(), LaurentPoly::zero());
        assert_eq!(gdim_proj(0).unwrap(), LaurentPoly::one());
        assert!(matches!(gdim_proj(-2), Err(QalgError::NegativeProjectiveSpace(-2))));
    }

    #[test]
    fn bar_examples() {
        assert_eq!(bar_involution(&lp("q + q^-1")), lp("q + q^-1"));
        assert_eq!(bar_involution(&lp("q^2")), lp("q^-2"));
        for n in 0..=8 {
            for k in 0..=n {
                let b = qbinom(n, k);
                assert!(b.is_bar_invariant(), "qbinom({n},{k}) not bar invariant");
                assert!(b.terms().iter().all(|(_, c)| c > &BigInt::from(0)));
            }
        }
        assert_eq!(evaluate_at_one(&LaurentPoly::zero()), BigInt::from(0));
    }

    #[test]
    fn shift_convention() {
        assert_eq!(decat_shift(-1, 1), lp("-q"));
        assert_eq!(decat_shift(2, -3), lp("q^-3"));
        // H*(P^1) = k[-1]{1} + k[1]{-1} decategorifies to -(q + q^-1).
        let p1 = &decat_shift(-1, 1) + &decat_shift(1, -1);
        assert_eq!(p1, -qint(2));
    }
}
