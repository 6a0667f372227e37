use std::collections::BTreeMap;
use std::fmt;

use crate::qalg::{LaurentPoly, RationalFunction};

/// Commutative ring operations needed by [`SparseMatrix`].
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Ring for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn one() -> Self {
        LaurentPoly::one()
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Ring for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Row-major sparse matrix; each row holds `(column, value)` pairs sorted by
/// column with no zero values.
#[derive(Clone, PartialEq)]
pub struct SparseMatrix<R: Ring> {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, R)>>,
}

impl<R: Ring> SparseMatrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, R::one())
    }

    pub fn scalar(n: usize, value: R) -> Self {
        let mut m = Self::zeros(n, n);
        if !value.is_zero() {
            for (r, row) in m.data.iter_mut().enumerate() {
                row.push((r, value.clone()));
            }
        }
        m
    }

    /// Duplicate positions are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, R)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, R>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) outside {rows}x{cols}");
            acc[r]
                .entry(c)
                .and_modify(|x| *x = x.add(&v))
                .or_insert(v);
        }
        let data = acc
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Self { rows, cols, data }
    }

    pub fn from_dense(dense: Vec<Vec<R>>, cols: usize) -> Self {
        let rows = dense.len();
        let data = dense
            .into_iter()
            .map(|row| {
                assert_eq!(row.len(), cols);
                row.into_iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn row(&self, r: usize) -> &[(usize, R)] {
        &self.data[r]
    }

    pub fn get(&self, r: usize, c: usize) -> R {
        match self.data[r].binary_search_by_key(&c, |(k, _)| *k) {
            Ok(idx) => self.data[r][idx].1.clone(),
            Err(_) => R::zero(),
        }
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &R)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<R>> {
        let mut out = vec![vec![R::zero(); self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> SparseMatrix<S> {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|(c, v)| (*c, f(v)))
                        .filter(|(_, v)| !v.is_zero())
                        .collect()
                })
                .collect(),
        }
    }

    /// Fallible entry map; stops at the first error.
    pub fn try_map<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<SparseMatrix<S>, E> {
        let mut data = Vec::with_capacity(self.rows);
        for row in &self.data {
            let mut out = Vec::with_capacity(row.len());
            for (c, v) in row {
                let s = f(v)?;
                if !s.is_zero() {
                    out.push((*c, s));
                }
            }
            data.push(out);
        }
        Ok(SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: &R) -> Self {
        if s.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        self.map(|v| v.mul(s))
    }

    pub fn neg(&self) -> Self {
        self.map(R::neg)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
                    let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
                    if take_a {
                        out.push(a[i].clone());
                        i += 1;
                    } else if take_b {
                        let v = if negate { b[j].1.neg() } else { b[j].1.clone() };
                        out.push((b[j].0, v));
                        j += 1;
                    } else {
                        let v = if negate { a[i].1.sub(&b[j].1) } else { a[i].1.add(&b[j].1) };
                        if !v.is_zero() {
                            out.push((a[i].0, v));
                        }
                        i += 1;
                        j += 1;
                    }
                }
                out
            })
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, R> = BTreeMap::new();
                for (k, a) in row {
                    for (c, b) in &other.data[*k] {
                        let p = a.mul(b);
                        match acc.get_mut(c) {
                            Some(x) => *x = x.add(&p),
                            None => {
                                acc.insert(*c, p);
                            }
                        }
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Self {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v.clone())))
    }

    /// Submatrix on the given row and column index lists (in that order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(k, c)| (*c, k)).collect();
        let data = rows
            .iter()
            .map(|r| {
                let mut row: Vec<(usize, R)> = self.data[*r]
                    .iter()
                    .filter_map(|(c, v)| col_pos.get(c).map(|k| (*k, v.clone())))
                    .collect();
                row.sort_by_key(|(k, _)| *k);
                row
            })
            .collect();
        Self {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    /// One `row col value` line per nonzero entry.
    pub fn to_text(&self) -> String {
        self.triplets()
            .map(|(r, c, v)| format!("{r} {c} {v}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl<R: Ring> fmt::Debug for SparseMatrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseMatrix {}x{} [", self.rows, self.cols)?;
        for (r, c, v) in self.triplets() {
            writeln!(f, "  ({r},{c}) {v}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn product_and_sum() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 0, lp("q")), (0, 1, lp("1")), (1, 1, lp("q^-1"))]);
        let b = SparseMatrix::from_triplets(2, 2, [(0, 1, lp("2")), (1, 0, lp("-1"))]);
        let ab = a.mul(&b);
        assert_eq!(ab.get(0, 0), lp("-1"));
        assert_eq!(ab.get(0, 1), lp("2*q"));
        assert_eq!(ab.get(1, 0), lp("-q^-1"));
        assert_eq!(ab.get(1, 1), LaurentPoly::zero());
        let s = a.add(&a.neg());
        assert!(s.is_zero());
        assert_eq!(a.sub(&b).add(&b), a);
        assert_eq!(SparseMatrix::<LaurentPoly>::identity(2).mul(&a), a);
    }

    #[test]
    fn triplets_sum_and_drop_zero() {
        let m = SparseMatrix::from_triplets(1, 2, [(0, 0, lp("q")), (0, 0, lp("-q")), (0, 1, lp("1"))]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.transpose().get(1, 0), lp("1"));
    }

    #[test]
    fn select_submatrix() {
        let m = SparseMatrix::from_dense(
            vec![
                vec![lp("1"), lp("2"), lp("3")],
                vec![lp("4"), lp("5"), lp("6")],
            ],
            3,
        );
        let s = m.select(&[1], &[2, 0]);
        assert_eq!(s.to_dense(), vec![vec![lp("6"), lp("4")]]);
    }
}
