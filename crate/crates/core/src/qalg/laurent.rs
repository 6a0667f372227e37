//! Integer Laurent polynomials in one variable `q`.
//!
//! Terms are kept sorted by exponent with no zero coefficients, so structural
//! equality is coefficient-map equality.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::QalgError;

/// An element of `Z[q, q^-1]`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: Vec<(i64, BigInt)>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `q` itself.
    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    /// `coeff * q^exp`.
    pub fn monomial(coeff: impl Into<BigInt>, exp: i64) -> Self {
        let c = coeff.into();
        if c.is_zero() {
            Self::zero()
        } else {
            Self {
                terms: vec![(exp, c)],
            }
        }
    }

    /// `sign * q^exp`; `sign` is taken as `+1` when nonnegative.
    pub fn signed_power(negative: bool, exp: i64) -> Self {
        Self::monomial(if negative { -1 } else { 1 }, exp)
    }

    /// Builds a polynomial from arbitrary `(exponent, coefficient)` pairs,
    /// summing duplicates.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut raw: Vec<(i64, BigInt)> = terms.into_iter().map(|(e, c)| (e, c.into())).collect();
        raw.sort_by_key(|(e, _)| *e);
        let mut out: Vec<(i64, BigInt)> = Vec::with_capacity(raw.len());
        for (e, c) in raw {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Self { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// Sorted `(exponent, coefficient)` pairs, none zero.
    pub fn terms(&self) -> &[(i64, BigInt)] {
        &self.terms
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        match self.terms.binary_search_by_key(&exp, |(e, _)| *e) {
            Ok(idx) => self.terms[idx].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.first().map(|(e, _)| *e)
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.last().map(|(e, _)| *e)
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// The substitution `q -> q^-1`.
    pub fn bar(&self) -> Self {
        let mut terms: Vec<(i64, BigInt)> = self.terms.iter().map(|(e, c)| (-e, c.clone())).collect();
        terms.reverse();
        Self { terms }
    }

    /// Sum of all coefficients, i.e. the value at `q = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.iter().map(|(_, c)| c).sum()
    }

    /// The same value viewed as a constant polynomial; the `q = 1` specialization
    /// kept inside the Laurent ring.
    pub fn specialize_one(&self) -> Self {
        Self::constant(self.eval_at_one())
    }

    /// `Some((negative, k))` when `self = ±q^k`.
    pub fn as_unit(&self) -> Option<(bool, i64)> {
        match self.terms.as_slice() {
            [(e, c)] if c.abs().is_one() => Some((c.is_negative(), *e)),
            _ => None,
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    /// Exact quotient `self / divisor` in `Z[q, q^-1]`, or `None` when the
    /// division does not come out even.
    pub fn div_exact(&self, divisor: &LaurentPoly) -> Option<LaurentPoly> {
        let (d_lo, d_hi) = (divisor.min_exp()?, divisor.max_exp()?);
        if self.is_zero() {
            return Some(Self::zero());
        }
        let d_lead = &divisor.terms.last()?.1;
        let lowest_allowed = self.min_exp()? - d_lo;
        let mut rem = self.clone();
        let mut quotient: Vec<(i64, BigInt)> = Vec::new();
        while let Some((top, c)) = rem.terms.last().cloned() {
            let e = top - d_hi;
            if e < lowest_allowed {
                return None;
            }
            let (qc, r) = (&c / d_lead, &c % d_lead);
            if !r.is_zero() {
                return None;
            }
            rem -= &divisor.shift(e).scale(&qc);
            quotient.push((e, qc));
        }
        quotient.reverse();
        Some(Self { terms: quotient })
    }

    fn add_into(&mut self, other: &LaurentPoly, negate: bool) {
        if other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = std::mem::take(&mut self.terms).into_iter().peekable();
        let mut b = other.terms.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ea, _)), Some((eb, _))) if ea == eb => {
                    let (e, ca) = a.next().unwrap();
                    let (_, cb) = b.next().unwrap();
                    let c = if negate { ca - cb } else { ca + cb };
                    if !c.is_zero() {
                        out.push((e, c));
                    }
                }
                (Some((ea, _)), Some((eb, _))) if ea < eb => out.push(a.next().unwrap()),
                (Some(_), Some(_)) | (None, Some(_)) => {
                    let (e, c) = b.next().unwrap();
                    out.push((*e, if negate { -c } else { c.clone() }));
                }
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, None) => break,
            }
        }
        self.terms = out;
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

impl From<BigInt> for LaurentPoly {
    fn from(c: BigInt) -> Self {
        Self::constant(c)
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        self.add_into(rhs, false);
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        self.add_into(rhs, true);
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        if let [(e, c)] = rhs.terms.as_slice() {
            if c.is_one() {
                return self.shift(*e);
            }
        }
        if let [(e, c)] = self.terms.as_slice() {
            if c.is_one() {
                return rhs.shift(*e);
            }
        }
        let lo = self.terms[0].0 + rhs.terms[0].0;
        let hi = self.terms.last().unwrap().0 + rhs.terms.last().unwrap().0;
        let mut dense = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                dense[(ea + eb - lo) as usize] += ca * cb;
            }
        }
        LaurentPoly {
            terms: dense
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (lo + k as i64, c))
                .collect(),
        }
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl fmt::Display for LaurentPoly {
    /// `coeff*q^exp` terms in increasing exponent, joined by ` + `; `0` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*q^{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl FromStr for LaurentPoly {
    type Err = QalgError;

    /// Accepts the canonical text form and looser hand-written variants such as
    /// `q^2`, `-q`, `3`, `2*q^-1 - q^3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_laurent(s)
    }
}

fn parse_laurent(input: &str) -> Result<LaurentPoly, QalgError> {
    let chars: Vec<char> = input.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(QalgError::Parse {
            input: input.to_string(),
            reason: "empty polynomial".into(),
        });
    }
    let err = |reason: &str| QalgError::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let mut pos = 0usize;
    let mut terms: Vec<(i64, BigInt)> = Vec::new();
    let read_int = |pos: &mut usize| -> Option<BigInt> {
        let start = *pos;
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            None
        } else {
            chars[start..*pos].iter().collect::<String>().parse().ok()
        }
    };
    let mut first = true;
    while pos < chars.len() {
        let mut negative = false;
        // Leading signs; `a + -b` is how the canonical form writes negatives.
        let mut saw_sep = first;
        while pos < chars.len() && (chars[pos] == '+' || chars[pos] == '-') {
            if chars[pos] == '-' {
                negative = !negative;
            }
            saw_sep = true;
            pos += 1;
        }
        if !saw_sep {
            return Err(err("expected '+' or '-' between terms"));
        }
        first = false;
        let coeff = read_int(&mut pos);
        let mut exp = 0i64;
        let has_star = pos < chars.len() && chars[pos] == '*';
        if has_star {
            if coeff.is_none() {
                return Err(err("'*' without a coefficient"));
            }
            pos += 1;
        }
        let has_q = pos < chars.len() && chars[pos] == 'q';
        if has_q && coeff.is_some() && !has_star {
            return Err(err("missing '*' between coefficient and 'q'"));
        }
        if has_q {
            pos += 1;
            exp = 1;
            if pos < chars.len() && chars[pos] == '^' {
                pos += 1;
                let mut eneg = false;
                if pos < chars.len() && chars[pos] == '-' {
                    eneg = true;
                    pos += 1;
                }
                let e = read_int(&mut pos).ok_or_else(|| err("missing exponent after '^'"))?;
                let e: i64 = e.try_into().map_err(|_| err("exponent out of range"))?;
                exp = if eneg { -e } else { e };
            }
        } else if has_star || coeff.is_none() {
            return Err(err("expected a coefficient or 'q'"));
        }
        let c = coeff.unwrap_or_else(BigInt::one);
        terms.push((exp, if negative { -c } else { c }));
    }
    Ok(LaurentPoly::from_terms(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn text_form_is_canonical() {
        let p = LaurentPoly::from_terms([(1, 1), (-1, 1)]);
        assert_eq!(p.to_string(), "1*q^-1 + 1*q^1");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(LaurentPoly::monomial(-3, 2).to_string(), "-3*q^2");
        assert_eq!(lp("1*q^-1 + -2*q^1"), LaurentPoly::from_terms([(-1, 1), (1, -2)]));
    }

    #[test]
    fn parses_loose_forms() {
        assert_eq!(lp("q^2"), LaurentPoly::monomial(1, 2));
        assert_eq!(lp("-q"), LaurentPoly::monomial(-1, 1));
        assert_eq!(lp("3"), LaurentPoly::constant(3));
        assert_eq!(lp("2*q^-1 - q^3 + 1"), LaurentPoly::from_terms([(-1, 2), (3, -1), (0, 1)]));
        assert!("q^".parse::<LaurentPoly>().is_err());
        assert!("".parse::<LaurentPoly>().is_err());
        assert!("2 q".parse::<LaurentPoly>().is_err());
    }

    #[test]
    fn from_terms_cancels() {
        let p = LaurentPoly::from_terms([(2, 1), (2, -1), (0, 5)]);
        assert_eq!(p, LaurentPoly::constant(5));
    }

    #[test]
    fn exact_division() {
        let a = lp("q + q^-1");
        let b = lp("q^2 + 1 + q^-2");
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(b.div_exact(&a), None);
        assert_eq!(lp("3").div_exact(&lp("2")), None);
        assert_eq!(lp("6*q^3").div_exact(&lp("-2*q")), Some(lp("-3*q^2")));
        assert_eq!(LaurentPoly::zero().div_exact(&a), Some(LaurentPoly::zero()));
        assert_eq!(a.div_exact(&LaurentPoly::zero()), None);
    }

    #[test]
    fn units_and_bar() {
        assert_eq!(lp("-q^3").as_unit(), Some((true, 3)));
        assert_eq!(lp("2*q").as_unit(), None);
        assert_eq!(lp("q^2").bar(), lp("q^-2"));
        assert!(lp("q + q^-1").is_bar_invariant());
        assert_eq!(lp("q^2 - 3").eval_at_one(), BigInt::from(-2));
    }

    #[test]
    fn pow_matches_repeated_product() {
        let a = lp("q - 2 + q^-3");
        let mut acc = LaurentPoly::one();
        for k in 0..6u32 {
            assert_eq!(a.pow(k), acc);
            acc = &acc * &a;
        }
    }
}
