//! Fraction-free elimination over `Z[q, q^-1]`.
//!
//! Every intermediate entry of the Bareiss / fraction-free Gauss-Jordan
//! process is a minor of the input, so each division below is exact; an
//! inexact one means the arithmetic is broken and is reported as such.

use super::{LinalgError, SparseMatrix};
use crate::qalg::{LaurentPoly, RationalFunction};

/// Determinant by Bareiss elimination on a dense copy.
pub fn determinant(m: &SparseMatrix<LaurentPoly>) -> Result<LaurentPoly, LinalgError> {
    if m.rows() != m.cols() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(LaurentPoly::one());
    }
    let mut a = m.to_dense();
    let mut prev = LaurentPoly::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Ok(LaurentPoly::zero());
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).ok_or(LinalgError::InexactPivot)?;
            }
            a[i][k] = LaurentPoly::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Fraction-free Gauss-Jordan on `[A | I]`. Returns `(X, d)` with
/// `A X = d I`, where `d = ±det A`.
pub fn scaled_inverse(m: &SparseMatrix<LaurentPoly>) -> Result<(SparseMatrix<LaurentPoly>, LaurentPoly), LinalgError> {
    if m.rows() != m.cols() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok((SparseMatrix::zeros(0, 0), LaurentPoly::one()));
    }
    let dense = m.to_dense();
    let mut a: Vec<Vec<LaurentPoly>> = dense
        .into_iter()
        .enumerate()
        .map(|(r, mut row)| {
            row.extend((0..n).map(|c| if c == r { LaurentPoly::one() } else { LaurentPoly::zero() }));
            row
        })
        .collect();
    let width = 2 * n;
    let mut prev = LaurentPoly::one();
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero()).ok_or(LinalgError::Singular)?;
        a.swap(p, k);
        let pivot_row = a[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let factor = row[k].clone();
            for j in 0..width {
                if j == k {
                    continue;
                }
                let num = &(&pivot_row[k] * &row[j]) - &(&factor * &pivot_row[j]);
                row[j] = num.div_exact(&prev).ok_or(LinalgError::InexactPivot)?;
            }
            row[k] = LaurentPoly::zero();
        }
        prev = pivot_row[k].clone();
    }
    let d = prev;
    let x: Vec<Vec<LaurentPoly>> = a.into_iter().map(|row| row[n..].to_vec()).collect();
    Ok((SparseMatrix::from_dense(x, n), d))
}

/// Splits a square matrix into the connected components of its nonzero
/// pattern (rows linked to columns). Each component is `(rows, cols)`.
pub fn components(m: &SparseMatrix<LaurentPoly>) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n_rows = m.rows();
    let total = n_rows + m.cols();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (r, c, _) in m.triplets() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, n_rows + c));
        if a != b {
            parent[a] = b;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> = Default::default();
    for x in 0..total {
        let root = find(&mut parent, x);
        let entry = groups.entry(root).or_default();
        if x < n_rows {
            entry.0.push(x);
        } else {
            entry.1.push(x - n_rows);
        }
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort_by_key(|(r, c)| (r.first().copied(), c.first().copied()));
    out
}

/// Exact inverse over rational functions, computed block by block on the
/// connected components of the sparsity pattern.
pub fn invert(m: &SparseMatrix<LaurentPoly>) -> Result<SparseMatrix<RationalFunction>, LinalgError> {
    if m.rows() != m.cols() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let mut triplets = Vec::new();
    for (rows, cols) in components(m) {
        if rows.len() != cols.len() {
            return Err(LinalgError::Singular);
        }
        let sub = m.select(&rows, &cols);
        let (x, d) = scaled_inverse(&sub)?;
        // sub * x = d I, so the inverse of sub is x / d, indexed (cols, rows).
        for (r, c, v) in x.triplets() {
            let entry = match v.div_exact(&d) {
                Some(exact) => RationalFunction::from(exact),
                None => RationalFunction::new(v.clone(), d.clone()).expect("pivot is nonzero"),
            };
            triplets.push((cols[r], rows[c], entry));
        }
    }
    Ok(SparseMatrix::from_triplets(m.cols(), m.rows(), triplets))
}
