//! Braid operators `T_i` on `V^{⊗N}`, one block per weight space, built as
//! alternating `q`-weighted sums of divided-power products:
//!
//! ```text
//! T_i 1_λ = Σ_s (-1)^s q^{γ(s)} F_i^{(m+s)} E_i^{(s)}     m = <λ, α_i> >= 0
//! T_i 1_λ = Σ_s (-1)^s q^{γ(s)} E_i^{(-m+s)} F_i^{(s)}    m <= 0
//! ```
//!
//! with `γ(s) = c1·s + c2·s²`. The exponents `(c1, c2)` and the units in the
//! root vectors are found by search rather than fixed in advance.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::cartan::Content;
use crate::linalg::{determinant, invert as invert_matrix, LinalgError, SparseMatrix};
use crate::qalg::{qfact, LaurentPoly, RationalFunction};
use crate::report::{CheckRun, ConventionTag, Counterexample, Params, VerificationReport};
use crate::tensor_rep::{build_module, Letter, OperatorMatrix, TensorError, WeightModule};

/// Modules on which a grading convention is tested.
pub const DERIVATION_MODULES: [(usize, usize); 3] = [(2, 2), (3, 2), (3, 3)];
/// Root-vector units `ε q^c` are searched over `|c| <= ROOT_UNIT_BOUND`.
pub const ROOT_UNIT_BOUND: i64 = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("block of T_{i} at weight {weight} is singular")]
    Singular { i: usize, weight: String },
    #[error("block of T_{i} at weight {weight} lands in {found}, expected {expected}")]
    WrongTarget {
        i: usize,
        weight: String,
        found: String,
        expected: String,
    },
    #[error("no grading convention with |c1|, |c2| <= {bound} passes; {diagnostic}")]
    NoConvention { bound: i64, diagnostic: String },
    #[error("linear algebra: {0}")]
    Linalg(#[from] LinalgError),
}

/// Whether identities are compared over `Z[q, q^-1]` or after setting `q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Specialization {
    Generic,
    QOne,
}

impl Specialization {
    fn apply(self, m: OperatorMatrix) -> OperatorMatrix {
        match self {
            Specialization::Generic => m,
            Specialization::QOne => m.specialize_one(),
        }
    }

    fn tag(self) -> i64 {
        match self {
            Specialization::Generic => 0,
            Specialization::QOne => 1,
        }
    }
}

/// The unit `ε q^c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootUnit {
    pub eps: i64,
    pub c: i64,
}

impl RootUnit {
    pub const ONE: RootUnit = RootUnit { eps: 1, c: 0 };

    pub fn value(self) -> LaurentPoly {
        LaurentPoly::monomial(self.eps, self.c)
    }

    /// Every unit `±q^c` with `|c| <= bound`, by increasing `|c|`, positive sign first.
    pub fn candidates(bound: i64) -> Vec<RootUnit> {
        let mut out = Vec::new();
        for c in (0..=bound).flat_map(|k| if k == 0 { vec![0] } else { vec![-k, k] }) {
            for eps in [1, -1] {
                out.push(RootUnit { eps, c });
            }
        }
        out
    }
}

impl fmt::Display for RootUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}q^{}", if self.eps < 0 { "-" } else { "" }, self.c)
    }
}

/// A root vector `scale · (X Y + ratio · Y X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootVectorUnits {
    pub scale: RootUnit,
    pub ratio: RootUnit,
}

impl RootVectorUnits {
    pub const PLAIN: RootVectorUnits = RootVectorUnits {
        scale: RootUnit::ONE,
        ratio: RootUnit::ONE,
    };

    pub fn candidates(bound: i64) -> Vec<RootVectorUnits> {
        let units = RootUnit::candidates(bound);
        units
            .iter()
            .flat_map(|&scale| units.iter().map(move |&ratio| RootVectorUnits { scale, ratio }))
            .collect()
    }
}

impl fmt::Display for RootVectorUnits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * (XY + {} YX)", self.scale, self.ratio)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GradingConvention {
    pub c1: i64,
    pub c2: i64,
    /// When set to `t`, the raising branch (`m < 0`) is multiplied by
    /// `(-1)^m q^{t·m}`.
    pub twist: Option<i64>,
    /// `r_ij = scale · (E_j E_i + ε q^c E_i E_j)`.
    pub root: RootVectorUnits,
    /// `scale · (F_i F_j + ε q^c F_j F_i)`.
    pub f_root: RootVectorUnits,
}

impl Default for GradingConvention {
    fn default() -> Self {
        Self::new(0, 0)
    }
}

impl GradingConvention {
    pub fn new(c1: i64, c2: i64) -> Self {
        Self {
            c1,
            c2,
            twist: None,
            root: RootVectorUnits::PLAIN,
            f_root: RootVectorUnits::PLAIN,
        }
    }

    pub fn with_twist(mut self, twist: Option<i64>) -> Self {
        self.twist = twist;
        self
    }

    pub fn with_root_units(mut self, root: RootVectorUnits, f_root: RootVectorUnits) -> Self {
        self.root = root;
        self.f_root = f_root;
        self
    }

    /// Same twist and root units, `γ ≡ 0`.
    pub fn untwisted_gamma(&self) -> Self {
        Self {
            c1: 0,
            c2: 0,
            ..*self
        }
    }

    pub fn gamma(&self, s: i64) -> i64 {
        self.c1 * s + self.c2 * s * s
    }

    /// `(-1)^s q^{γ(s)}`.
    pub fn coefficient(&self, s: i64) -> LaurentPoly {
        LaurentPoly::signed_power(s % 2 == 1, self.gamma(s))
    }

    /// Extra factor on the block at a weight with pairing `m`.
    pub fn branch_factor(&self, m: i64) -> LaurentPoly {
        match self.twist {
            Some(t) if m < 0 => LaurentPoly::signed_power(m % 2 != 0, t * m),
            _ => LaurentPoly::one(),
        }
    }

    pub fn tag(&self) -> ConventionTag {
        ConventionTag {
            c1: self.c1,
            c2: self.c2,
            eps: self.root.ratio.eps,
            c: self.root.ratio.c,
            twist: self.twist,
            scale: (self.root.scale != RootUnit::ONE).then(|| self.root.scale.to_string()),
        }
    }
}

impl fmt::Display for GradingConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gamma(s) = {}*s + {}*s^2", self.c1, self.c2)?;
        if let Some(t) = self.twist {
            write!(f, ", raising branch twist (-1)^m q^({t}m)")?;
        }
        write!(f, ", r_ij = {}, f_ij = {}", self.root, self.f_root)
    }
}

/// Which of the two Rickard formulas to use at a weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `F^{(m+s)} E^{(s)}`, valid for `m >= 0`.
    Lowering,
    /// `E^{(-m+s)} F^{(s)}`, valid for `m <= 0`.
    Raising,
}

/// One branch of the alternating sum at `λ`, or `None` when the branch does
/// not apply to the sign of `<λ, α_i>`.
pub fn rickard_branch(
    m: &WeightModule,
    conv: &GradingConvention,
    i: usize,
    weight: &Content,
    branch: Branch,
) -> Result<Option<OperatorMatrix>, BraidError> {
    m.check_index(i)?;
    m.check_weight(weight)?;
    let pairing = weight.pairing(i);
    let target = weight.swapped(i);
    let mut acc = OperatorMatrix::new(
        weight.clone(),
        target.clone(),
        SparseMatrix::zeros(m.dim(&target), m.dim(weight)),
    );
    type MakeLetter = fn(usize, u32) -> Letter;
    let (shift, outer, inner): (i64, MakeLetter, MakeLetter) = match branch {
        Branch::Lowering if pairing >= 0 => (pairing, Letter::f, Letter::e),
        Branch::Raising if pairing <= 0 => (-pairing, Letter::e, Letter::f),
        _ => return Ok(None),
    };
    // terms vanish once s exceeds the tensor length
    for s in 0..=m.len() as i64 {
        let word = [outer(i, (shift + s) as u32), inner(i, s as u32)];
        let term = m.word_matrix(&word, weight)?;
        if term.is_zero() {
            continue;
        }
        acc = acc.add(&term.scale(&conv.coefficient(s)))?;
    }
    Ok(Some(acc.scale(&conv.branch_factor(pairing))))
}

/// The block of `T_i` from the `λ` space to the `s_i(λ)` space.
pub fn rickard_block(m: &WeightModule, conv: &GradingConvention, i: usize, weight: &Content) -> Result<OperatorMatrix, BraidError> {
    m.check_weight(weight)?;
    let branch = if weight.pairing(i) >= 0 { Branch::Lowering } else { Branch::Raising };
    Ok(rickard_branch(m, conv, i, weight, branch)?.expect("branch matches the sign of the pairing"))
}

/// `T_i` on every weight space of a module.
#[derive(Debug, Clone, PartialEq)]
pub struct BraidOperator {
    i: usize,
    blocks: BTreeMap<Content, OperatorMatrix>,
}

impl BraidOperator {
    pub fn index(&self) -> usize {
        self.i
    }

    /// The block at `source`; weights with an empty space get a `0 x 0` block.
    pub fn block(&self, source: &Content) -> Cow<'_, OperatorMatrix> {
        match self.blocks.get(source) {
            Some(b) => Cow::Borrowed(b),
            None => Cow::Owned(OperatorMatrix::new(
                source.clone(),
                source.swapped(self.i),
                SparseMatrix::zeros(0, 0),
            )),
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&Content, &OperatorMatrix)> {
        self.blocks.iter()
    }

    pub fn specialize_one(&self) -> BraidOperator {
        BraidOperator {
            i: self.i,
            blocks: self.blocks.iter().map(|(k, v)| (k.clone(), v.specialize_one())).collect(),
        }
    }
}

/// Assembles every block of `T_i` and checks that each lands in `s_i(λ)`.
pub fn braid_operator(m: &WeightModule, conv: &GradingConvention, i: usize) -> Result<BraidOperator, BraidError> {
    m.check_index(i)?;
    let blocks: Vec<(Content, OperatorMatrix)> = m
        .weights()
        .par_iter()
        .map(|w| rickard_block(m, conv, i, w).map(|b| (w.clone(), b)))
        .collect::<Result<_, _>>()?;
    for (w, b) in &blocks {
        let expected = m.cartan().reflect(&w.weight(), i);
        if b.target().weight().pairings() != expected.pairings() || b.target() != &w.swapped(i) {
            return Err(BraidError::WrongTarget {
                i,
                weight: w.to_string(),
                found: b.target().to_string(),
                expected: w.swapped(i).to_string(),
            });
        }
    }
    Ok(BraidOperator {
        i,
        blocks: blocks.into_iter().collect(),
    })
}

/// A block over rational functions.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalBlock {
    pub source: Content,
    pub target: Content,
    pub matrix: SparseMatrix<RationalFunction>,
}

impl RationalBlock {
    pub fn from_operator(op: &OperatorMatrix) -> Self {
        Self {
            source: op.source().clone(),
            target: op.target().clone(),
            matrix: op.matrix().map(|v| RationalFunction::from(v.clone())),
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &RationalBlock) -> Result<RationalBlock, BraidError> {
        if first.target != self.source {
            return Err(TensorError::WeightMismatch {
                left: self.source.to_string(),
                right: first.target.to_string(),
            }
            .into());
        }
        Ok(RationalBlock {
            source: first.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&first.matrix),
        })
    }

    /// The block as a Laurent matrix, when every entry is a Laurent polynomial.
    pub fn to_operator(&self) -> Option<OperatorMatrix> {
        let m = self.matrix.try_map(|v| v.to_laurent().ok_or(())).ok()?;
        Some(OperatorMatrix::new(self.source.clone(), self.target.clone(), m))
    }
}

/// `T_i^{-1}`, keyed by source weight (so the block at `μ` maps `μ` to `s_i(μ)`).
#[derive(Debug, Clone, PartialEq)]
pub struct InverseBraidOperator {
    i: usize,
    blocks: BTreeMap<Content, RationalBlock>,
}

impl InverseBraidOperator {
    pub fn index(&self) -> usize {
        self.i
    }

    pub fn block(&self, source: &Content) -> &RationalBlock {
        &self.blocks[source]
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&Content, &RationalBlock)> {
        self.blocks.iter()
    }
}

/// Inverts every block and checks `T · T^{-1} = id` exactly.
pub fn invert(t: &BraidOperator) -> Result<InverseBraidOperator, BraidError> {
    let inverted: Vec<(Content, RationalBlock)> = t
        .blocks
        .par_iter()
        .map(|(w, b)| {
            let inv = invert_matrix(b.matrix()).map_err(|e| match e {
                LinalgError::Singular => BraidError::Singular {
                    i: t.i,
                    weight: w.to_string(),
                },
                other => other.into(),
            })?;
            let block = RationalBlock {
                source: b.target().clone(),
                target: w.clone(),
                matrix: inv,
            };
            let forward = RationalBlock::from_operator(b);
            let id = SparseMatrix::identity(b.matrix().rows());
            if forward.after(&block)?.matrix != id {
                return Err(BraidError::Singular {
                    i: t.i,
                    weight: w.to_string(),
                });
            }
            Ok((block.source.clone(), block))
        })
        .collect::<Result<_, _>>()?;
    Ok(InverseBraidOperator {
        i: t.i,
        blocks: inverted.into_iter().collect(),
    })
}

/// Inverse of an inverse, back to Laurent entries; `None` if some entry is
/// not a Laurent polynomial.
pub fn invert_back(t: &InverseBraidOperator) -> Result<Option<BraidOperator>, BraidError> {
    let mut blocks = BTreeMap::new();
    for (w, b) in &t.blocks {
        let (num, den) = common_denominator(&b.matrix);
        let inv = invert_matrix(&num)?;
        let mut laurent = Vec::new();
        for (r, c, v) in inv.triplets() {
            let scaled = v * &RationalFunction::from(den.clone());
            match scaled.to_laurent() {
                Some(p) => laurent.push((r, c, p)),
                None => return Ok(None),
            }
        }
        blocks.insert(
            b.target.clone(),
            OperatorMatrix::new(
                b.target.clone(),
                w.clone(),
                SparseMatrix::from_triplets(inv.rows(), inv.cols(), laurent),
            ),
        );
    }
    Ok(Some(BraidOperator { i: t.i, blocks }))
}

/// Writes `M = N / d` with `N` Laurent and `d` the product of distinct
/// entry denominators.
fn common_denominator(m: &SparseMatrix<RationalFunction>) -> (SparseMatrix<LaurentPoly>, LaurentPoly) {
    let mut den = LaurentPoly::one();
    let mut seen: Vec<LaurentPoly> = Vec::new();
    for (_, _, v) in m.triplets() {
        if v.denominator().as_unit().is_none() && !seen.contains(v.denominator()) {
            seen.push(v.denominator().clone());
            den = &den * v.denominator();
        }
    }
    let scaled = m.map(|v| {
        (v * &RationalFunction::from(den.clone()))
            .to_laurent()
            .expect("common denominator clears every entry")
    });
    (scaled, den)
}

/// Product of braid operators on the `λ` space, rightmost applied first.
pub fn braid_word_block(ops: &[&BraidOperator], weight: &Content) -> Result<OperatorMatrix, BraidError> {
    let mut iter = ops.iter().rev();
    let first = iter.next().ok_or_else(|| BraidError::Precondition("empty braid word".into()))?;
    let mut acc = first.block(weight).into_owned();
    for op in iter {
        acc = op.block(acc.target()).after(&acc)?;
    }
    Ok(acc)
}

fn mismatch(weight: &Content, words: [&str; 2], lhs: &OperatorMatrix, rhs: &OperatorMatrix) -> Counterexample {
    Counterexample {
        weight: weight.to_string(),
        words: words.iter().map(|w| w.to_string()).collect(),
        lhs: lhs.matrix().to_text(),
        rhs: rhs.matrix().to_text(),
    }
}

fn params(m: &WeightModule, i: usize, j: usize, at: Specialization) -> Params {
    Params::module(m.n(), m.len()).with_i(i).with_j(j).with("q_one", at.tag())
}

/// Collects per-weight outcomes in weight order.
fn sweep<F>(m: &WeightModule, mut run: CheckRun, per_weight: F) -> Result<VerificationReport, BraidError>
where
    F: Fn(&Content) -> Result<Option<Counterexample>, BraidError> + Sync + Send,
{
    let outcomes: Vec<Result<Option<Counterexample>, BraidError>> = m.weights().par_iter().map(per_weight).collect();
    for outcome in outcomes {
        match outcome? {
            Some(cx) => run.fail_case(cx),
            None => run.record_case(),
        }
    }
    Ok(run.finish())
}

fn require_pair(m: &WeightModule, i: usize, j: usize, adjacent: bool) -> Result<(), BraidError> {
    m.check_index(i)?;
    m.check_index(j)?;
    if i == j {
        return Err(BraidError::Precondition(format!("need i != j, got {i}")));
    }
    if adjacent && !m.cartan().adjacent(i, j) {
        return Err(BraidError::Precondition(format!("vertices {i} and {j} are not adjacent")));
    }
    Ok(())
}

/// `T_i T_j T_i = T_j T_i T_j` for adjacent `i, j`, and `T_i T_j = T_j T_i`
/// otherwise, block by block.
pub fn check_braid_relation(
    m: &WeightModule,
    conv: &GradingConvention,
    i: usize,
    j: usize,
    at: Specialization,
) -> Result<VerificationReport, BraidError> {
    require_pair(m, i, j, false)?;
    let ti = braid_operator(m, conv, i)?;
    let tj = braid_operator(m, conv, j)?;
    let adjacent = m.cartan().adjacent(i, j);
    let (check, citation) = if adjacent {
        ("braid_relation", "thm-2.10")
    } else {
        ("braid_commutation", "thm-2.10")
    };
    let run = CheckRun::start(check, citation, params(m, i, j, at));
    let report = sweep(m, run, |w| {
        let (lhs, rhs, words) = if adjacent {
            (
                braid_word_block(&[&ti, &tj, &ti], w)?,
                braid_word_block(&[&tj, &ti, &tj], w)?,
                ["Ti Tj Ti", "Tj Ti Tj"],
            )
        } else {
            (braid_word_block(&[&ti, &tj], w)?, braid_word_block(&[&tj, &ti], w)?, ["Ti Tj", "Tj Ti"])
        };
        let (lhs, rhs) = (at.apply(lhs), at.apply(rhs));
        Ok((lhs != rhs).then(|| mismatch(w, words, &lhs, &rhs)))
    })?;
    Ok(report.with_convention(conv.tag()))
}

/// At `q = 1` every block of `T_i` has determinant `±1`.
pub fn check_unimodular(m: &WeightModule, conv: &GradingConvention, i: usize) -> Result<VerificationReport, BraidError> {
    let t = braid_operator(m, conv, i)?.specialize_one();
    let run = CheckRun::start("q_one_unimodular", "thm-2.9", Params::module(m.n(), m.len()).with_i(i));
    let report = sweep(m, run, |w| {
        let det = determinant(t.block(w).matrix())?;
        let ok = det.is_one() || (-det.clone()).is_one();
        Ok((!ok).then(|| Counterexample {
            weight: w.to_string(),
            words: vec!["det Ti".into()],
            lhs: det.to_string(),
            rhs: "±1".into(),
        }))
    })?;
    Ok(report.with_convention(conv.tag()))
}

/// Every block of `T_i` lands at `s_i λ` and is invertible over `Q(q)` with
/// `T_i T_i^{-1} = id`.
pub fn check_invertible(m: &WeightModule, conv: &GradingConvention, i: usize) -> Result<VerificationReport, BraidError> {
    m.check_index(i)?;
    let mut run = CheckRun::start("braid_invertible", "thm-2.9", Params::module(m.n(), m.len()).with_i(i));
    let failure = |weight: String, why: String| Counterexample {
        weight,
        words: vec!["Ti".into()],
        lhs: why,
        rhs: String::new(),
    };
    match braid_operator(m, conv, i).and_then(|t| invert(&t)) {
        Ok(inv) => inv.blocks().for_each(|_| run.record_case()),
        Err(e @ BraidError::Singular { .. }) => run.fail_case(failure(singular_weight(&e), e.to_string())),
        Err(e @ BraidError::WrongTarget { .. }) => run.fail_case(failure(singular_weight(&e), e.to_string())),
        Err(e) => return Err(e),
    }
    Ok(run.finish().with_convention(conv.tag()))
}

fn singular_weight(e: &BraidError) -> String {
    match e {
        BraidError::Singular { weight, .. } | BraidError::WrongTarget { weight, .. } => weight.clone(),
        _ => String::new(),
    }
}

/// Where `<λ, α_i> = 0` the two Rickard formulas agree.
pub fn check_branch_agreement(m: &WeightModule, conv: &GradingConvention, i: usize) -> Result<VerificationReport, BraidError> {
    m.check_index(i)?;
    let run = CheckRun::start("rickard_branch_agreement", "thm-2.9", Params::module(m.n(), m.len()).with_i(i));
    let report = sweep(m, run, |w| {
        if w.pairing(i) != 0 {
            return Ok(None);
        }
        let low = rickard_branch(m, conv, i, w, Branch::Lowering)?.expect("m = 0");
        let high = rickard_branch(m, conv, i, w, Branch::Raising)?.expect("m = 0");
        Ok((low != high).then(|| mismatch(w, ["F^(s) E^(s)", "E^(s) F^(s)"], &low, &high)))
    })?;
    Ok(report.with_convention(conv.tag()))
}

/// `r_ij = scale · (E_j E_i + ε q^c E_i E_j)` on the `λ` space.
pub fn root_vector(m: &WeightModule, conv: &GradingConvention, i: usize, j: usize, weight: &Content) -> Result<OperatorMatrix, BraidError> {
    require_pair(m, i, j, true)?;
    root_combination(m, conv.root, Letter::e(j, 1), Letter::e(i, 1), weight)
}

/// `scale · (F_i F_j + ε q^c F_j F_i)` on the `λ` space.
pub fn f_root_vector(m: &WeightModule, conv: &GradingConvention, i: usize, j: usize, weight: &Content) -> Result<OperatorMatrix, BraidError> {
    require_pair(m, i, j, true)?;
    root_combination(m, conv.f_root, Letter::f(i, 1), Letter::f(j, 1), weight)
}

fn root_combination(m: &WeightModule, units: RootVectorUnits, x: Letter, y: Letter, weight: &Content) -> Result<OperatorMatrix, BraidError> {
    let first = m.word_matrix(&[x, y], weight)?;
    let second = m.word_matrix(&[y, x], weight)?;
    Ok(first.add(&second.scale(&units.ratio.value()))?.scale(&units.scale.value()))
}

/// `r_ij^r` (or the lowering root vector to the `r`) on the `λ` space.
fn root_power(
    m: &WeightModule,
    conv: &GradingConvention,
    (i, j): (usize, usize),
    lowering: bool,
    r: u32,
    weight: &Content,
) -> Result<OperatorMatrix, BraidError> {
    let mut acc = m.identity(weight);
    for _ in 0..r {
        let step = if lowering {
            f_root_vector(m, conv, i, j, acc.target())?
        } else {
            root_vector(m, conv, i, j, acc.target())?
        };
        acc = step.after(&acc)?;
    }
    Ok(acc)
}

/// Which root vector a conjugation check covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootHalf {
    Raising,
    Lowering,
    Both,
}

impl RootHalf {
    fn parts(self) -> &'static [bool] {
        match self {
            RootHalf::Raising => &[false],
            RootHalf::Lowering => &[true],
            RootHalf::Both => &[false, true],
        }
    }
}

/// `r_ij^r T_i = [r]! T_i E_j^{(r)}` and `f_ij^r T_i = [r]! T_i F_j^{(r)}` for
/// `r <= max_power`, i.e. `T_i E_j^{(r)} T_i^{-1}` is the `r`-th divided power
/// of the root vector.
pub fn conjugation_check(
    m: &WeightModule,
    conv: &GradingConvention,
    i: usize,
    j: usize,
    max_power: u32,
    at: Specialization,
) -> Result<VerificationReport, BraidError> {
    conjugation_check_half(m, conv, (i, j), max_power, at, RootHalf::Both)
}

pub fn conjugation_check_half(
    m: &WeightModule,
    conv: &GradingConvention,
    (i, j): (usize, usize),
    max_power: u32,
    at: Specialization,
    half: RootHalf,
) -> Result<VerificationReport, BraidError> {
    require_pair(m, i, j, true)?;
    let ti = braid_operator(m, conv, i)?;
    let p = params(m, i, j, at).with("max_power", max_power as i64);
    let run = CheckRun::start("root_vector_conjugation", "cor-5.4", p);
    let report = sweep(m, run, |w| {
        let tw = ti.block(w);
        for r in 1..=max_power {
            for &lowering in half.parts() {
                let lhs = root_power(m, conv, (i, j), lowering, r, tw.target())?.after(&tw)?;
                let letter = if lowering { Letter::f(j, r) } else { Letter::e(j, r) };
                let inner = m.word_matrix(&[letter], w)?;
                let rhs = ti.block(inner.target()).after(&inner)?.scale(&qfact(r));
                let (lhs, rhs) = (at.apply(lhs), at.apply(rhs));
                if lhs != rhs {
                    let root_name = if lowering { "f_ij" } else { "r_ij" };
                    let words = [format!("{root_name}^{r} Ti"), format!("[{r}]! Ti {letter}")];
                    return Ok(Some(mismatch(w, [&words[0], &words[1]], &lhs, &rhs)));
                }
            }
        }
        Ok(None)
    })?;
    Ok(report.with_convention(conv.tag()))
}

/// Checks on `t_ij = T_i T_j T_i^{-1}`:
/// (a) `t_ij T_i = T_i T_j`;
/// (b) `t_ij` is Laurent and equals the alternating sum
///     `Σ_s (-1)^s q^{γ(s)} f_ij^{(m+s)} r_ij^{(s)}` (or its raising mirror, with
///     the branch twist) where `m = <λ, α_i + α_j>`;
/// (c) `T_j t_ij = T_i T_j`.
pub fn check_tij_factorization(m: &WeightModule, conv: &GradingConvention, i: usize, j: usize) -> Result<VerificationReport, BraidError> {
    require_pair(m, i, j, true)?;
    let ti = braid_operator(m, conv, i)?;
    let tj = braid_operator(m, conv, j)?;
    let ti_inv = invert(&ti)?;
    let run = CheckRun::start("tij_factorization", "prop-5.6", params(m, i, j, Specialization::Generic));
    let report = sweep(m, run, |w| {
        let rational = |op: Cow<'_, OperatorMatrix>| RationalBlock::from_operator(&op);
        // t_ij at μ: T_i^{-1} (μ -> s_i μ), then T_j, then T_i
        let tij_at = |mu: &Content| -> Result<RationalBlock, BraidError> {
            let inv = ti_inv.block(mu);
            let after_j = rational(tj.block(&inv.target)).after(inv)?;
            rational(ti.block(&after_j.target)).after(&after_j)
        };
        let tij = tij_at(w)?;

        let ti_w = ti.block(w);
        let lhs_a = tij_at(ti_w.target())?.after(&rational(ti_w))?;
        let tj_w = tj.block(w);
        let rhs_a = rational(ti.block(tj_w.target())).after(&rational(tj_w))?;
        if lhs_a != rhs_a {
            return Ok(Some(Counterexample {
                weight: w.to_string(),
                words: vec!["tij Ti".into(), "Ti Tj".into()],
                lhs: lhs_a.matrix.to_text(),
                rhs: rhs_a.matrix.to_text(),
            }));
        }

        let lhs_c = rational(tj.block(&tij.target)).after(&tij)?;
        let tj_first = tj.block(w);
        let rhs_c = rational(ti.block(tj_first.target())).after(&rational(tj_first))?;
        if lhs_c != rhs_c {
            return Ok(Some(Counterexample {
                weight: w.to_string(),
                words: vec!["Tj tij".into(), "Ti Tj".into()],
                lhs: lhs_c.matrix.to_text(),
                rhs: rhs_c.matrix.to_text(),
            }));
        }

        let Some(tij_laurent) = tij.to_operator() else {
            return Ok(Some(Counterexample {
                weight: w.to_string(),
                words: vec!["tij".into()],
                lhs: tij.matrix.to_text(),
                rhs: "Laurent entries".into(),
            }));
        };
        let pairing = w.pairing(i) + w.pairing(j);
        let mut sum = OperatorMatrix::new(
            w.clone(),
            tij_laurent.target().clone(),
            SparseMatrix::zeros(tij_laurent.matrix().rows(), tij_laurent.matrix().cols()),
        );
        // lowering branch f^(m+s) r^(s), raising branch r^(-m+s) f^(s)
        let inner_lowers = pairing < 0;
        for s in 0..=m.len() as u32 {
            let (inner_r, outer_r) = (s, pairing.unsigned_abs() as u32 + s);
            let first = root_power(m, conv, (i, j), inner_lowers, inner_r, w)?;
            let term = root_power(m, conv, (i, j), !inner_lowers, outer_r, first.target())?.after(&first)?;
            if term.target() != sum.target() || term.is_zero() {
                continue;
            }
            let denom = &qfact(inner_r) * &qfact(outer_r);
            let divided = term
                .matrix()
                .try_map(|v| v.div_exact(&denom).ok_or(()))
                .map_err(|_| TensorError::InexactDivision {
                    kind: "root vector".into(),
                    r: outer_r,
                    weight: w.to_string(),
                })?;
            let divided = OperatorMatrix::new(term.source().clone(), term.target().clone(), divided);
            sum = sum.add(&divided.scale(&conv.coefficient(s as i64)))?;
        }
        let sum = sum.scale(&conv.branch_factor(pairing));
        Ok((sum != tij_laurent).then(|| mismatch(w, ["tij", "alternating root-vector sum"], &tij_laurent, &sum)))
    })?;
    Ok(report.with_convention(conv.tag()))
}

/// Outcome of testing one `(c1, c2, twist)` choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateOutcome {
    pub c1: i64,
    pub c2: i64,
    pub twist: Option<i64>,
    pub invertible: bool,
    pub braid_relations: bool,
    pub q_one_agrees: bool,
    /// Root-vector units under which `T_i E_j T_i^{-1} = r_ij` on every test module.
    pub root_units: Vec<RootVectorUnits>,
    pub f_root_units: Vec<RootVectorUnits>,
}

impl CandidateOutcome {
    /// Invertible blocks, braid relations and `q = 1` agreement.
    pub fn braids(&self) -> bool {
        self.invertible && self.braid_relations && self.q_one_agrees
    }

    /// Additionally admits root vectors conjugating correctly.
    pub fn passed(&self) -> bool {
        self.braids() && !self.root_units.is_empty() && !self.f_root_units.is_empty()
    }

    pub fn convention(&self) -> GradingConvention {
        let conv = GradingConvention::new(self.c1, self.c2).with_twist(self.twist);
        match (self.root_units.first(), self.f_root_units.first()) {
            (Some(&r), Some(&f)) => conv.with_root_units(r, f),
            _ => conv,
        }
    }
}

impl fmt::Display for CandidateOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let twist = self.twist.map_or("none".to_string(), |t| t.to_string());
        write!(
            f,
            "c1={} c2={} twist={} invertible={} braid={} q1={} e-units={} f-units={}",
            self.c1,
            self.c2,
            twist,
            self.invertible,
            self.braid_relations,
            self.q_one_agrees,
            self.root_units.len(),
            self.f_root_units.len()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConventionDerivation {
    pub search_bound: i64,
    pub candidates: Vec<CandidateOutcome>,
    pub chosen: GradingConvention,
}

impl ConventionDerivation {
    pub fn passing(&self) -> impl Iterator<Item = &CandidateOutcome> {
        self.candidates.iter().filter(|c| c.passed())
    }

    /// Every passing `(c1, c2, twist, root units)` combination.
    pub fn passing_conventions(&self) -> Vec<GradingConvention> {
        let mut out = Vec::new();
        for cand in self.passing() {
            let base = GradingConvention::new(cand.c1, cand.c2).with_twist(cand.twist);
            for &r in &cand.root_units {
                for &f in &cand.f_root_units {
                    out.push(base.with_root_units(r, f));
                }
            }
        }
        out
    }
}

/// `(c1, c2)` pairs with `|c1|, |c2| <= bound`, by increasing max-norm.
fn search_order(bound: i64) -> Vec<(i64, i64)> {
    let mut pairs: Vec<(i64, i64)> = (-bound..=bound)
        .flat_map(|c1| (-bound..=bound).map(move |c2| (c1, c2)))
        .collect();
    pairs.sort_by_key(|&(c1, c2)| (c1.abs().max(c2.abs()), c1.abs() + c2.abs(), -c1, -c2));
    pairs
}

/// No twist first, then twists by increasing `|t|`.
fn twist_order(bound: i64) -> Vec<Option<i64>> {
    let mut out = vec![None];
    for k in 0..=bound {
        out.push(Some(-k));
        if k > 0 {
            out.push(Some(k));
        }
    }
    out
}

fn test_braiding(modules: &[WeightModule], conv: &GradingConvention) -> Result<(bool, bool, bool), BraidError> {
    let baseline = conv.untwisted_gamma();
    let (mut invertible, mut braid, mut q_one) = (true, true, true);
    for m in modules {
        for i in m.indices() {
            let t = braid_operator(m, conv, i)?;
            for (_, b) in t.blocks() {
                if b.matrix().rows() > 0 && determinant(b.matrix())?.is_zero() {
                    invertible = false;
                }
            }
            if t.specialize_one() != braid_operator(m, &baseline, i)?.specialize_one() {
                q_one = false;
            }
            for j in m.indices().filter(|&j| j > i) {
                if !check_braid_relation(m, conv, i, j, Specialization::Generic)?.passed() {
                    braid = false;
                }
            }
        }
    }
    Ok((invertible, braid, q_one))
}

/// Units `(scale, ratio)` with `scale · (XY + ratio · YX) · T_i = T_i · Z_j` on
/// every weight of every module and every ordered adjacent pair.
fn passing_root_units(modules: &[&WeightModule], conv: &GradingConvention, lowering: bool) -> Result<Vec<RootVectorUnits>, BraidError> {
    // (XY ∘ T, YX ∘ T, T ∘ Z) per weight
    let mut pieces: Vec<(OperatorMatrix, OperatorMatrix, OperatorMatrix)> = Vec::new();
    for m in modules {
        for i in m.indices() {
            let ti = braid_operator(m, conv, i)?;
            for j in m.indices().filter(|&j| m.cartan().adjacent(i, j)) {
                let (x, y, z) = if lowering {
                    (Letter::f(i, 1), Letter::f(j, 1), Letter::f(j, 1))
                } else {
                    (Letter::e(j, 1), Letter::e(i, 1), Letter::e(j, 1))
                };
                for w in m.weights() {
                    let tw = ti.block(w);
                    let xy = m.word_matrix(&[x, y], tw.target())?.after(&tw)?;
                    let yx = m.word_matrix(&[y, x], tw.target())?.after(&tw)?;
                    let inner = m.word_matrix(&[z], w)?;
                    let tz = ti.block(inner.target()).after(&inner)?;
                    pieces.push((xy, yx, tz));
                }
            }
        }
    }
    Ok(RootVectorUnits::candidates(ROOT_UNIT_BOUND)
        .into_iter()
        .filter(|u| {
            pieces.iter().all(|(xy, yx, tz)| {
                let combo = xy
                    .add(&yx.scale(&u.ratio.value()))
                    .expect("same weights")
                    .scale(&u.scale.value());
                &combo == tz
            })
        })
        .collect())
}

fn test_candidate(modules: &[WeightModule], c1: i64, c2: i64, twist: Option<i64>) -> Result<CandidateOutcome, BraidError> {
    let conv = GradingConvention::new(c1, c2).with_twist(twist);
    let (invertible, braid_relations, q_one_agrees) = test_braiding(modules, &conv)?;
    let mut outcome = CandidateOutcome {
        c1,
        c2,
        twist,
        invertible,
        braid_relations,
        q_one_agrees,
        root_units: Vec::new(),
        f_root_units: Vec::new(),
    };
    if outcome.braids() {
        // conjugation needs a rank-2 module
        let rank_two: Vec<&WeightModule> = modules.iter().filter(|m| m.n() >= 3).collect();
        outcome.root_units = passing_root_units(&rank_two, &conv, false)?;
        outcome.f_root_units = passing_root_units(&rank_two, &conv, true)?;
    }
    Ok(outcome)
}

/// Brute-force search for `(c1, c2)`, the raising-branch twist and the
/// root-vector units. Candidates without a twist are preferred; the first
/// passing candidate in search order is chosen.
pub fn derive_grading_convention(search_bound: i64) -> Result<ConventionDerivation, BraidError> {
    if search_bound < 0 {
        return Err(BraidError::Precondition("search bound must be nonnegative".into()));
    }
    let modules: Vec<WeightModule> = DERIVATION_MODULES
        .iter()
        .map(|&(n, len)| build_module(n, len))
        .collect::<Result<_, _>>()?;
    let grid: Vec<(i64, i64, Option<i64>)> = twist_order(search_bound)
        .into_iter()
        .flat_map(|t| search_order(search_bound).into_iter().map(move |(c1, c2)| (c1, c2, t)))
        .collect();
    let candidates: Vec<CandidateOutcome> = grid
        .into_par_iter()
        .map(|(c1, c2, t)| test_candidate(&modules, c1, c2, t))
        .collect::<Result<_, _>>()?;
    match candidates.iter().find(|c| c.passed()) {
        Some(first) => {
            let chosen = first.convention();
            Ok(ConventionDerivation {
                search_bound,
                candidates,
                chosen,
            })
        }
        None => {
            let braiding: Vec<String> = candidates.iter().filter(|c| c.braids()).map(|c| c.to_string()).collect();
            let diagnostic = if braiding.is_empty() {
                "no candidate satisfies invertibility, braid relations and q = 1 agreement".to_string()
            } else {
                format!(
                    "braid relations hold for [{}] but no root-vector units with |c| <= {ROOT_UNIT_BOUND} conjugate correctly",
                    braiding.join("; ")
                )
            };
            Err(BraidError::NoConvention {
                bound: search_bound,
                diagnostic,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[i64]) -> Content {
        Content(v.to_vec())
    }

    fn derived() -> GradingConvention {
        GradingConvention::new(1, 0).with_twist(Some(-1)).with_root_units(
            RootVectorUnits {
                scale: RootUnit::ONE,
                ratio: RootUnit { eps: -1, c: 1 },
            },
            RootVectorUnits {
                scale: RootUnit::ONE,
                ratio: RootUnit { eps: -1, c: -1 },
            },
        )
    }

    #[test]
    fn defining_rep_blocks_swap_basis() {
        let m = build_module(2, 1).unwrap();
        let t = braid_operator(&m, &GradingConvention::default(), 1).unwrap().specialize_one();
        let one = LaurentPoly::one();
        assert_eq!(t.block(&c(&[1, 0])).target(), &c(&[0, 1]));
        assert_eq!(t.block(&c(&[1, 0])).matrix().get(0, 0), one);
        assert_eq!(t.block(&c(&[0, 1])).matrix().get(0, 0), one);
    }

    #[test]
    fn block_census_and_empty_block() {
        let m = build_module(2, 2).unwrap();
        let t = braid_operator(&m, &derived(), 1).unwrap();
        let sizes: Vec<usize> = t.blocks().map(|(_, b)| b.matrix().rows()).collect();
        assert_eq!(sizes, vec![1, 2, 1]);
        let empty = t.block(&c(&[3, -1]));
        assert_eq!((empty.matrix().rows(), empty.matrix().cols()), (0, 0));
        let m = build_module(3, 2).unwrap();
        let t = braid_operator(&m, &derived(), 1).unwrap();
        for (w, b) in t.blocks() {
            assert_eq!(b.target(), &w.swapped(1));
        }
    }

    #[test]
    fn branches_agree_at_zero_pairing() {
        for (n, len) in [(2, 2), (3, 3), (2, 4)] {
            let m = build_module(n, len).unwrap();
            for conv in [derived(), GradingConvention::new(0, 1), GradingConvention::default()] {
                for i in m.indices() {
                    let r = check_branch_agreement(&m, &conv, i).unwrap();
                    assert!(r.passed(), "{}", r.summary_line());
                }
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = build_module(3, 3).unwrap();
        let t = braid_operator(&m, &derived(), 2).unwrap();
        let inv = invert(&t).unwrap();
        for (w, b) in inv.blocks() {
            assert_eq!(&b.target, &w.swapped(2));
        }
        assert_eq!(invert_back(&inv).unwrap().unwrap(), t);
    }

    #[test]
    fn braid_relations_small() {
        let conv = derived();
        let m = build_module(3, 2).unwrap();
        assert!(check_braid_relation(&m, &conv, 1, 2, Specialization::Generic).unwrap().passed());
        let m = build_module(4, 2).unwrap();
        let r = check_braid_relation(&m, &conv, 1, 3, Specialization::Generic).unwrap();
        assert!(r.passed());
        assert_eq!(r.check, "braid_commutation");
        let m = build_module(3, 3).unwrap();
        let plain = GradingConvention::default();
        assert!(check_braid_relation(&m, &plain, 1, 2, Specialization::QOne).unwrap().passed());
        assert!(matches!(
            check_braid_relation(&m, &conv, 1, 1, Specialization::Generic),
            Err(BraidError::Precondition(_))
        ));
    }

    #[test]
    fn wrong_grading_breaks_braid_relation() {
        let m = build_module(3, 3).unwrap();
        let r = check_braid_relation(&m, &GradingConvention::new(0, 0), 1, 2, Specialization::Generic).unwrap();
        assert!(!r.passed());
        assert!(r.counterexample_weight.is_some());
    }

    #[test]
    fn unimodular_at_q_one() {
        let m = build_module(3, 3).unwrap();
        for i in m.indices() {
            assert!(check_unimodular(&m, &derived(), i).unwrap().passed());
        }
    }

    #[test]
    fn root_vector_on_defining_rep() {
        let m = build_module(3, 1).unwrap();
        let r = root_vector(&m, &derived(), 1, 2, &c(&[1, 0, 0])).unwrap();
        assert_eq!(r.target(), &c(&[0, 0, 1]));
        assert_eq!(r.matrix().get(0, 0), LaurentPoly::one());
        let zero = root_vector(&m, &derived(), 1, 2, &c(&[0, 0, 1])).unwrap();
        assert!(zero.is_zero());
        assert!(root_vector(&build_module(4, 1).unwrap(), &derived(), 1, 3, &c(&[1, 0, 0, 0])).is_err());
    }

    #[test]
    fn conjugation_and_negative_control() {
        let conv = derived();
        for len in [2, 3] {
            let m = build_module(3, len).unwrap();
            for (i, j) in [(1, 2), (2, 1)] {
                for at in [Specialization::Generic, Specialization::QOne] {
                    let r = conjugation_check(&m, &conv, i, j, 2, at).unwrap();
                    assert!(r.passed(), "{}", r.summary_line());
                }
            }
        }
        let m = build_module(3, 2).unwrap();
        let mut wrong = conv;
        wrong.root.ratio.eps = 1;
        assert!(!conjugation_check(&m, &wrong, 1, 2, 1, Specialization::Generic).unwrap().passed());
        let mut wrong = conv;
        wrong.f_root.ratio.c = 1;
        assert!(!conjugation_check(&m, &wrong, 1, 2, 1, Specialization::Generic).unwrap().passed());
    }

    #[test]
    fn tij_factorization() {
        let conv = derived();
        for len in [2, 3] {
            let m = build_module(3, len).unwrap();
            for (i, j) in [(1, 2), (2, 1)] {
                let r = check_tij_factorization(&m, &conv, i, j).unwrap();
                assert!(r.passed(), "{}", r.summary_line());
            }
        }
    }

    #[test]
    fn derivation_finds_expected_convention() {
        let d = derive_grading_convention(2).unwrap();
        assert_eq!(d.chosen, derived());
        assert!(d.candidates.iter().any(|c| c.c1 == 0 && c.c2 == 0 && !c.braids()));
        assert!(d.passing_conventions().contains(&derived()));
        let err = derive_grading_convention(0).unwrap_err();
        assert!(matches!(err, BraidError::NoConvention { bound: 0, .. }));
    }
}
