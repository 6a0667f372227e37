use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// A polynomial in `x_1..x_m` with integer coefficients. Exponent vectors are
/// kept in lexicographic order with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl MultiPoly {
    pub fn zero(vars: usize) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: usize) -> Self {
        Self::monomial(vars, vec![0; vars], 1)
    }

    pub fn constant(vars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(vars, vec![0; vars], c)
    }

    /// `x_k`, 1-based.
    pub fn var(vars: usize, k: usize) -> Self {
        let mut e = vec![0; vars];
        e[k - 1] = 1;
        Self::monomial(vars, e, 1)
    }

    pub fn monomial(vars: usize, exps: Vec<u32>, c: impl Into<BigInt>) -> Self {
        assert_eq!(exps.len(), vars, "exponent vector length");
        let mut p = Self::zero(vars);
        p.add_term(exps, c.into());
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    /// Polynomial degree of the top term; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Internal degree, each variable counting 2. `None` for zero or a
    /// non-homogeneous polynomial.
    pub fn internal_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|e| 2 * e.iter().sum::<u32>());
        let d = degrees.next()?;
        degrees.all(|x| x == d).then_some(d)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    /// `x_k * self`.
    pub fn mul_var(&self, k: usize) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e[k - 1] += 1;
            out.terms.insert(e, c.clone());
        }
        out
    }

    /// Exchanges `x_k` and `x_{k+1}`.
    pub fn swap(&self, k: usize) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e.swap(k - 1, k);
            out.terms.insert(e, c.clone());
        }
        out
    }

    /// Exact quotient by `x_k - x_{k+1}`, or `None` when it does not divide.
    pub fn div_by_difference(&self, k: usize) -> Option<Self> {
        let mut rest = self.clone();
        let mut quotient = Self::zero(self.vars);
        // peel off a term containing x_k until none is left
        while let Some((e, c)) = rest.terms.iter().rev().find(|(e, _)| e[k - 1] > 0).map(|(e, c)| (e.clone(), c.clone())) {
            let mut qe = e.clone();
            qe[k - 1] -= 1;
            let mut lower = qe.clone();
            lower[k] += 1;
            rest.add_term(e, -c.clone());
            rest.add_term(lower, c.clone());
            quotient.add_term(qe, c);
        }
        rest.is_zero().then_some(quotient)
    }

    /// Evaluation at an integer point.
    pub fn eval(&self, point: &[i64]) -> BigInt {
        let mut total = BigInt::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &p) in point.iter().zip(e) {
                term *= BigInt::from(*x).pow(p);
            }
            total += term;
        }
        total
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-BigInt::one())
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let e = a.iter().zip(b).map(|(p, q)| p + q).collect();
                out.add_term(e, x * y);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            for (v, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{}", v + 1)?,
                    _ => write!(f, "*x{}^{p}", v + 1)?,
                }
            }
        }
        Ok(())
    }
}

/// All exponent vectors in `vars` variables of total degree at most `bound`,
/// in increasing degree then lexicographic order.
pub fn monomials_up_to(vars: usize, bound: u32) -> Vec<Vec<u32>> {
    fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, left: u32, slots: usize) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=left).rev() {
            cur.push(a);
            fill(out, cur, left - a, slots - 1);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for d in 0..=bound {
        fill(&mut out, &mut Vec::new(), d, vars);
    }
    out
}
