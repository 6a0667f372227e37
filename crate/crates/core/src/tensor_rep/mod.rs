//! `U_q(sl_n)` with divided powers acting on `V^{⊗N}`, the `N`-th tensor power
//! of the defining representation, one sparse matrix per weight space.
//!
//! Basis vectors are words `w ∈ {1..n}^N`; the weight of a word is its content
//! (letter multiplicities), and each weight space is ordered lexicographically.
//! The action uses the coproduct
//!
//! ```text
//! Δ(E_i) = E_i ⊗ 1 + K_i ⊗ E_i,    Δ(F_i) = F_i ⊗ K_i^{-1} + 1 ⊗ F_i
//! ```
//!
//! applied left to right over the tensor factors, so `E_i` acting at position
//! `p` picks up `K_i` from every earlier factor and `F_i` picks up `K_i^{-1}`
//! from every later one. `E_i` turns a letter `i` into `i + 1`.

mod cache;
mod verify;

pub use cache::{CacheStats, MatrixCache};
pub use verify::{
    verify_distant_and_ef_commutations, verify_divided_power_rule, verify_ef_straightening,
    verify_ef_straightening_all, verify_mixed_decompositions, verify_serre,
};

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use thiserror::Error;

use crate::cartan::{CartanData, Content};
use crate::linalg::SparseMatrix;
use crate::qalg::{qfact, LaurentPoly};

/// Hard caps on `(n, N)` unless raised explicitly.
pub const DEFAULT_MAX_RANK: usize = 6;
pub const DEFAULT_MAX_LENGTH: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("module (n={n}, N={len}) exceeds the size cap (n <= {max_n}, N <= {max_len})")]
    SizeCap {
        n: usize,
        len: usize,
        max_n: usize,
        max_len: usize,
    },
    #[error("need n >= 2 and N >= 1, got n={n}, N={len}")]
    TooSmall { n: usize, len: usize },
    #[error("{0} is not a weight of this module")]
    InvalidWeight(String),
    #[error("generator index {index} out of range 1..={max}")]
    InvalidIndex { index: usize, max: usize },
    #[error("inexact division by [{r}]! in {kind}^({r}) at weight {weight}")]
    InexactDivision { kind: String, r: u32, weight: String },
    #[error("cannot compose: inner weights {left} and {right} differ")]
    WeightMismatch { left: String, right: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("matrix cache: {0}")]
    Cache(String),
}

/// Which Chevalley generator a matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenKind {
    E,
    F,
    K,
    KInv,
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenKind::E => "E",
            GenKind::F => "F",
            GenKind::K => "K",
            GenKind::KInv => "Kinv",
        })
    }
}

impl std::str::FromStr for GenKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "E" => Ok(GenKind::E),
            "F" => Ok(GenKind::F),
            "K" => Ok(GenKind::K),
            "Kinv" => Ok(GenKind::KInv),
            other => Err(format!("unknown generator kind {other:?}")),
        }
    }
}

/// Raising or lowering divided power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LetterKind {
    E,
    F,
}

impl LetterKind {
    pub fn gen(self) -> GenKind {
        match self {
            LetterKind::E => GenKind::E,
            LetterKind::F => GenKind::F,
        }
    }

    /// Sign of the root shift: `E` adds `alpha_i`, `F` subtracts it.
    pub fn sign(self) -> i64 {
        match self {
            LetterKind::E => 1,
            LetterKind::F => -1,
        }
    }
}

/// `E_i^{(r)}` or `F_i^{(r)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub kind: LetterKind,
    pub index: usize,
    pub power: u32,
}

impl Letter {
    pub fn e(index: usize, power: u32) -> Self {
        Self {
            kind: LetterKind::E,
            index,
            power,
        }
    }

    pub fn f(index: usize, power: u32) -> Self {
        Self {
            kind: LetterKind::F,
            index,
            power,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            LetterKind::E => 'E',
            LetterKind::F => 'F',
        };
        if self.power == 1 {
            write!(f, "{k}{}", self.index)
        } else {
            write!(f, "{k}{}^({})", self.index, self.power)
        }
    }
}

/// A linear map between two weight spaces. Rows are indexed by the target
/// basis and columns by the source basis.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    source: Content,
    target: Content,
    matrix: SparseMatrix<LaurentPoly>,
}

impl OperatorMatrix {
    pub fn new(source: Content, target: Content, matrix: SparseMatrix<LaurentPoly>) -> Self {
        Self { source, target, matrix }
    }

    pub fn identity(weight: Content, dim: usize) -> Self {
        Self::new(weight.clone(), weight, SparseMatrix::identity(dim))
    }

    pub fn source(&self) -> &Content {
        &self.source
    }

    pub fn target(&self) -> &Content {
        &self.target
    }

    pub fn matrix(&self) -> &SparseMatrix<LaurentPoly> {
        &self.matrix
    }

    pub fn into_matrix(self) -> SparseMatrix<LaurentPoly> {
        self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &OperatorMatrix) -> Result<OperatorMatrix, TensorError> {
        if first.target != self.source {
            return Err(TensorError::WeightMismatch {
                left: self.source.to_string(),
                right: first.target.to_string(),
            });
        }
        Ok(Self::new(
            first.source.clone(),
            self.target.clone(),
            self.matrix.mul(&first.matrix),
        ))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &OperatorMatrix) -> Result<OperatorMatrix, TensorError> {
        next.after(self)
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix, TensorError> {
        self.check_same_shape(other)?;
        Ok(Self::new(self.source.clone(), self.target.clone(), self.matrix.add(&other.matrix)))
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<OperatorMatrix, TensorError> {
        self.check_same_shape(other)?;
        Ok(Self::new(self.source.clone(), self.target.clone(), self.matrix.sub(&other.matrix)))
    }

    pub fn scale(&self, s: &LaurentPoly) -> OperatorMatrix {
        Self::new(self.source.clone(), self.target.clone(), self.matrix.scale(s))
    }

    /// Entry-wise `q = 1` specialization (entries become constants).
    pub fn specialize_one(&self) -> OperatorMatrix {
        Self::new(
            self.source.clone(),
            self.target.clone(),
            self.matrix.map(LaurentPoly::specialize_one),
        )
    }

    fn check_same_shape(&self, other: &OperatorMatrix) -> Result<(), TensorError> {
        if self.source != other.source || self.target != other.target {
            return Err(TensorError::WeightMismatch {
                left: format!("{}->{}", self.source, self.target),
                right: format!("{}->{}", other.source, other.target),
            });
        }
        Ok(())
    }

    /// Every nonzero entry is `±q^k`.
    pub fn entries_are_signed_monomials(&self) -> bool {
        self.matrix.triplets().all(|(_, _, v)| v.as_unit().is_some())
    }

    pub fn to_text(&self) -> String {
        format!(
            "{} -> {} ({}x{}):\n{}",
            self.source,
            self.target,
            self.matrix.rows(),
            self.matrix.cols(),
            self.matrix.to_text()
        )
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The ordered basis of one weight space.
#[derive(Debug)]
pub struct Basis {
    words: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl Basis {
    fn for_content(content: &Content) -> Self {
        let mut words = Vec::new();
        let mut counts: Vec<i64> = content.0.clone();
        let len: i64 = counts.iter().sum();
        let mut current = Vec::with_capacity(len as usize);
        fn rec(counts: &mut [i64], current: &mut Vec<u8>, left: i64, out: &mut Vec<Vec<u8>>) {
            if left == 0 {
                out.push(current.clone());
                return;
            }
            for letter in 0..counts.len() {
                if counts[letter] > 0 {
                    counts[letter] -= 1;
                    current.push(letter as u8 + 1);
                    rec(counts, current, left - 1, out);
                    current.pop();
                    counts[letter] += 1;
                }
            }
        }
        if counts.iter().all(|&c| c >= 0) {
            rec(&mut counts, &mut current, len, &mut words);
        }
        let index = words.iter().enumerate().map(|(k, w)| (w.clone(), k)).collect();
        Self { words, index }
    }

    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn position(&self, word: &[u8]) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

type MatrixKey = (GenKind, usize, u32, Content);

/// `V^{⊗N}` for `U_q(sl_n)`: weights, bases and cached generator matrices.
pub struct WeightModule {
    n: usize,
    len: usize,
    cartan: CartanData,
    weights: Vec<Content>,
    weight_index: HashMap<Content, usize>,
    bases: Vec<OnceLock<Basis>>,
    empty_basis: Basis,
    matrices: RwLock<HashMap<MatrixKey, Arc<OperatorMatrix>>>,
    disk: Option<MatrixCache>,
}

impl fmt::Debug for WeightModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightModule(n={}, N={})", self.n, self.len)
    }
}

/// `C(n, N)`: compositions of `N` into `n` nonnegative parts, in
/// lexicographically decreasing order of the content vector.
pub fn compositions(n: usize, len: usize) -> Vec<Content> {
    fn rec(n: usize, left: i64, prefix: &mut Vec<i64>, out: &mut Vec<Content>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(Content(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=left).rev() {
            prefix.push(first);
            rec(n, left - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, len as i64, &mut Vec::new(), &mut out);
    out
}

/// Builds `V^{⊗N}` for `U_q(sl_n)` under the default size caps.
pub fn build_module(n: usize, len: usize) -> Result<WeightModule, TensorError> {
    WeightModule::with_limits(n, len, DEFAULT_MAX_RANK, DEFAULT_MAX_LENGTH)
}

impl WeightModule {
    pub fn with_limits(n: usize, len: usize, max_n: usize, max_len: usize) -> Result<Self, TensorError> {
        if n < 2 || len < 1 {
            return Err(TensorError::TooSmall { n, len });
        }
        if n > max_n || len > max_len {
            return Err(TensorError::SizeCap { n, len, max_n, max_len });
        }
        let weights = compositions(n, len);
        let weight_index = weights.iter().enumerate().map(|(k, w)| (w.clone(), k)).collect();
        let bases = weights.iter().map(|_| OnceLock::new()).collect();
        Ok(Self {
            n,
            len,
            cartan: CartanData::type_a(n - 1),
            weights,
            weight_index,
            bases,
            empty_basis: Basis {
                words: Vec::new(),
                index: HashMap::new(),
            },
            matrices: RwLock::new(HashMap::new()),
            disk: None,
        })
    }

    /// Attaches an on-disk matrix cache consulted before computing divided powers.
    pub fn with_disk_cache(mut self, cache: MatrixCache) -> Self {
        self.disk = Some(cache);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Tensor length `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cartan(&self) -> &CartanData {
        &self.cartan
    }

    /// Generator indices `1..n`.
    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n - 1
    }

    pub fn weights(&self) -> &[Content] {
        &self.weights
    }

    pub fn total_dim(&self) -> usize {
        self.weights.iter().map(|w| self.dim(w)).sum()
    }

    /// A content vector belongs to this module's weight lattice slice when it
    /// has `n` entries summing to `N`; entries may be negative (empty space).
    pub fn check_weight(&self, weight: &Content) -> Result<(), TensorError> {
        if weight.n() != self.n || weight.total() != self.len as i64 {
            return Err(TensorError::InvalidWeight(weight.to_string()));
        }
        Ok(())
    }

    pub fn check_index(&self, i: usize) -> Result<(), TensorError> {
        if i == 0 || i >= self.n {
            return Err(TensorError::InvalidIndex {
                index: i,
                max: self.n - 1,
            });
        }
        Ok(())
    }

    pub fn basis(&self, weight: &Content) -> &Basis {
        match self.weight_index.get(weight) {
            Some(&k) => self.bases[k].get_or_init(|| Basis::for_content(weight)),
            None => &self.empty_basis,
        }
    }

    pub fn dim(&self, weight: &Content) -> usize {
        self.basis(weight).len()
    }

    fn zero_map(&self, source: &Content, target: Content) -> OperatorMatrix {
        let (rows, cols) = (self.dim(&target), self.dim(source));
        OperatorMatrix::new(source.clone(), target, SparseMatrix::zeros(rows, cols))
    }

    pub fn identity(&self, weight: &Content) -> OperatorMatrix {
        OperatorMatrix::identity(weight.clone(), self.dim(weight))
    }

    /// Matrix of `E_i`, `F_i`, `K_i` or `K_i^{-1}` on the `weight` space.
    pub fn generator_matrix(&self, kind: GenKind, i: usize, weight: &Content) -> Result<OperatorMatrix, TensorError> {
        self.check_index(i)?;
        self.check_weight(weight)?;
        Ok(self.generator_unchecked(kind, i, weight))
    }

    fn generator_unchecked(&self, kind: GenKind, i: usize, weight: &Content) -> OperatorMatrix {
        let letter_i = i as u8;
        let letter_next = letter_i + 1;
        let pairing = |w: u8| -> i64 { i64::from(w == letter_next) - i64::from(w == letter_i) };
        let source_basis = self.basis(weight);
        match kind {
            GenKind::K | GenKind::KInv => {
                let d = weight.pairing(i);
                let exp = if kind == GenKind::K { d } else { -d };
                OperatorMatrix::new(
                    weight.clone(),
                    weight.clone(),
                    SparseMatrix::scalar(source_basis.len(), LaurentPoly::monomial(1, exp)),
                )
            }
            GenKind::E | GenKind::F => {
                let (from, to, step) = if kind == GenKind::E {
                    (letter_i, letter_next, 1)
                } else {
                    (letter_next, letter_i, -1)
                };
                let target = weight.add_root(i, step);
                let target_basis = self.basis(&target);
                let mut triplets = Vec::new();
                for (col, word) in source_basis.words().iter().enumerate() {
                    for p in 0..word.len() {
                        if word[p] != from {
                            continue;
                        }
                        let exp: i64 = if kind == GenKind::E {
                            word[..p].iter().map(|&w| pairing(w)).sum()
                        } else {
                            -word[p + 1..].iter().map(|&w| pairing(w)).sum::<i64>()
                        };
                        let mut image = word.clone();
                        image[p] = to;
                        let row = target_basis.position(&image).expect("image word lies in target space");
                        triplets.push((row, col, LaurentPoly::monomial(1, exp)));
                    }
                }
                OperatorMatrix::new(
                    weight.clone(),
                    target.clone(),
                    SparseMatrix::from_triplets(target_basis.len(), source_basis.len(), triplets),
                )
            }
        }
    }

    /// `E_i^{(r)}` or `F_i^{(r)}` on the `weight` space: the `r`-th power divided
    /// exactly by `[r]!`. An inexact division is an error.
    pub fn divided_power(&self, kind: LetterKind, i: usize, r: u32, weight: &Content) -> Result<Arc<OperatorMatrix>, TensorError> {
        self.check_index(i)?;
        self.check_weight(weight)?;
        let key: MatrixKey = (kind.gen(), i, r, weight.clone());
        if let Some(m) = self.matrices.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(m));
        }
        let target = weight.add_root(i, kind.sign() * r as i64);
        let dims = (self.dim(&target), self.dim(weight));
        let loaded = match &self.disk {
            Some(disk) => disk.load(self.n, self.len, (kind.gen(), i, r, weight), &target, dims)?,
            None => None,
        };
        let computed = match loaded {
            Some(m) => m,
            None => {
                let m = self.compute_divided_power(kind, i, r, weight)?;
                if let Some(disk) = &self.disk {
                    disk.store(self.n, self.len, (kind.gen(), i, r), &m)?;
                }
                m
            }
        };
        let mut guard = self.matrices.write().expect("cache lock");
        Ok(Arc::clone(guard.entry(key).or_insert_with(|| Arc::new(computed))))
    }

    fn compute_divided_power(&self, kind: LetterKind, i: usize, r: u32, weight: &Content) -> Result<OperatorMatrix, TensorError> {
        if r == 0 {
            return Ok(self.identity(weight));
        }
        let target = weight.add_root(i, kind.sign() * r as i64);
        if self.dim(weight) == 0 || self.dim(&target) == 0 {
            return Ok(self.zero_map(weight, target));
        }
        let mut acc = self.identity(weight);
        for _ in 0..r {
            let step = self.generator_unchecked(kind.gen(), i, acc.target());
            acc = step.after(&acc)?;
        }
        let fact = qfact(r);
        let divided = acc
            .matrix
            .try_map(|v| v.div_exact(&fact).ok_or(()))
            .map_err(|_| TensorError::InexactDivision {
                kind: kind.gen().to_string(),
                r,
                weight: weight.to_string(),
            })?;
        Ok(OperatorMatrix::new(acc.source, acc.target, divided))
    }

    /// Matrix of a product of divided powers on the `weight` space. Letters are
    /// listed as in an operator product: the rightmost acts first.
    pub fn word_matrix(&self, letters: &[Letter], weight: &Content) -> Result<OperatorMatrix, TensorError> {
        self.check_weight(weight)?;
        let mut acc = self.identity(weight);
        for letter in letters.iter().rev() {
            self.check_index(letter.index)?;
            let step = self.divided_power(letter.kind, letter.index, letter.power, acc.target())?;
            acc = step.after(&acc)?;
        }
        Ok(acc)
    }

    /// Number of generator matrices currently held in memory.
    pub fn cached_matrices(&self) -> usize {
        self.matrices.read().expect("cache lock").len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[i64]) -> Content {
        Content(v.to_vec())
    }

    fn lp(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn weight_census() {
        let m = build_module(2, 2).unwrap();
        let dims: Vec<_> = m.weights().iter().map(|w| (w.clone(), m.dim(w))).collect();
        assert_eq!(dims, vec![(c(&[2, 0]), 1), (c(&[1, 1]), 2), (c(&[0, 2]), 1)]);
        let m = build_module(2, 1).unwrap();
        assert_eq!(m.weights().iter().map(|w| m.dim(w)).collect::<Vec<_>>(), vec![1, 1]);
        let m = build_module(3, 3).unwrap();
        assert_eq!(m.dim(&c(&[1, 1, 1])), 6);
        assert_eq!(m.total_dim(), 27);
    }

    #[test]
    fn size_caps() {
        assert!(matches!(build_module(7, 2), Err(TensorError::SizeCap { .. })));
        assert!(matches!(build_module(2, 9), Err(TensorError::SizeCap { .. })));
        assert!(matches!(build_module(1, 2), Err(TensorError::TooSmall { .. })));
        assert!(WeightModule::with_limits(2, 9, 6, 9).is_ok());
    }

    #[test]
    fn defining_representation() {
        let m = build_module(2, 1).unwrap();
        let e = m.generator_matrix(GenKind::E, 1, &c(&[1, 0])).unwrap();
        assert_eq!(e.target(), &c(&[0, 1]));
        assert_eq!(e.matrix().get(0, 0), LaurentPoly::one());
        let f = m.generator_matrix(GenKind::F, 1, &c(&[0, 1])).unwrap();
        assert_eq!(f.matrix().get(0, 0), LaurentPoly::one());
        let e_top = m.generator_matrix(GenKind::E, 1, &c(&[0, 1])).unwrap();
        assert!(e_top.is_zero());
        assert_eq!(m.dim(e_top.target()), 0);
    }

    #[test]
    fn coproduct_on_two_factors() {
        let m = build_module(2, 2).unwrap();
        let e = m.generator_matrix(GenKind::E, 1, &c(&[2, 0])).unwrap();
        // target basis (1,1): [1,2], [2,1]
        let b = m.basis(&c(&[1, 1]));
        assert_eq!(b.words(), &[vec![1, 2], vec![2, 1]]);
        assert_eq!(e.matrix().get(1, 0), LaurentPoly::one());
        assert_eq!(e.matrix().get(0, 0), lp("q^-1"));
        let k = m.generator_matrix(GenKind::K, 1, &c(&[2, 0])).unwrap();
        assert_eq!(k.matrix().get(0, 0), lp("q^-2"));
    }

    #[test]
    fn divided_powers() {
        let m = build_module(2, 2).unwrap();
        let e2 = m.divided_power(LetterKind::E, 1, 2, &c(&[2, 0])).unwrap();
        assert_eq!(e2.target(), &c(&[0, 2]));
        assert_eq!(e2.matrix().get(0, 0), LaurentPoly::one());
        let e0 = m.divided_power(LetterKind::E, 1, 0, &c(&[1, 1])).unwrap();
        assert_eq!(*e0, m.identity(&c(&[1, 1])));
        let e3 = m.divided_power(LetterKind::E, 1, 3, &c(&[2, 0])).unwrap();
        assert!(e3.is_zero());
    }

    #[test]
    fn composition_checks_weights() {
        let m = build_module(2, 2).unwrap();
        let e = m.generator_matrix(GenKind::E, 1, &c(&[2, 0])).unwrap();
        let err = e.after(&e).unwrap_err();
        assert!(matches!(err, TensorError::WeightMismatch { .. }));
        assert!(m.generator_matrix(GenKind::E, 2, &c(&[2, 0])).is_err());
        assert!(m.generator_matrix(GenKind::E, 1, &c(&[2, 1])).is_err());
    }
}
