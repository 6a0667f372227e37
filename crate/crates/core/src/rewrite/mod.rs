//! Rewriting of formal `Z[q,q^-1]`-combinations of words in divided powers
//! `E_i^{(r)}`, `F_i^{(r)}`, anchored at a source weight. The tensor model is
//! the equality oracle; the rewriter only simplifies.
//!
//! A word is an operator product: its rightmost letter acts first on the
//! anchor.

mod parse;
mod rules;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::cartan::{CartanData, CartanError, Content, Weight};
use crate::qalg::LaurentPoly;
use crate::report::{CheckRun, Counterexample, Params, VerificationReport};
use crate::tensor_rep::{Letter, OperatorMatrix, TensorError, WeightModule};

pub use parse::{parse_anchor, parse_letter, parse_sum, parse_terms};
pub use rules::{
    normal_form, normal_form_with, rule_commute_distant, rule_merge_divided, rule_serre, rule_straighten_ef, Measure,
    NormalForm, Rule, DEFAULT_ORDER, DEFAULT_STEP_CAP,
};

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("syntax error at token {token}: {reason}")]
    Syntax { token: usize, reason: String },
    #[error("word {word} lands at {got}, but the sum lands at {expected}")]
    IncompatibleWeights { word: String, expected: String, got: String },
    #[error("sums anchored at different weights: {left} vs {right}")]
    AnchorMismatch { left: String, right: String },
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error("weight {weight} is not realizable in (n={n}, N={len})")]
    Unrealizable { weight: String, n: usize, len: usize },
    #[error("rewriting did not finish after {steps} steps; stuck at {term}")]
    IterationCap { steps: usize, term: String },
    #[error("rule {rule} did not decrease the measure: {before} -> {after} at {term}")]
    MeasureIncrease {
        rule: &'static str,
        before: String,
        after: String,
        term: String,
    },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// A sequence of letters; `id` when empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormalWord(Vec<Letter>);

impl FormalWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Net root shift, one coefficient per simple root.
    pub fn shift(&self, rank: usize) -> Vec<i64> {
        let mut out = vec![0; rank];
        for l in &self.0 {
            out[l.index - 1] += l.kind.sign() * l.power as i64;
        }
        out
    }

    /// Weights seen while applying the word to `source`, rightmost letter
    /// first: entry `p` is the weight letter `p` acts on, the last entry is
    /// the target.
    pub fn weight_flow(&self, cartan: &CartanData, source: &Weight) -> Vec<Weight> {
        let mut flow = vec![source.clone(); self.0.len() + 1];
        let mut current = source.clone();
        for p in (0..self.0.len()).rev() {
            let l = self.0[p];
            flow[p] = current.clone();
            current = cartan.shift_by_root(&current, l.index, l.kind.sign() * l.power as i64);
        }
        flow[self.0.len()] = current;
        flow
    }

    /// True when some intermediate content leaves `N^n`.
    pub fn is_null(&self, cartan: &CartanData, source: &Weight) -> bool {
        self.weight_flow(cartan, source).iter().any(|w| !w.is_realizable())
    }
}

impl fmt::Display for FormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("id");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// `sum_w c_w * w`, all words applied to the same anchor and landing at the
/// same weight.
#[derive(Debug, Clone)]
pub struct FormalSum {
    cartan: Arc<CartanData>,
    source: Weight,
    shift: Option<Vec<i64>>,
    terms: BTreeMap<FormalWord, LaurentPoly>,
}

impl PartialEq for FormalSum {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.terms == other.terms
    }
}

impl FormalSum {
    pub fn zero(cartan: Arc<CartanData>, source: Weight) -> Self {
        Self {
            cartan,
            source,
            shift: None,
            terms: BTreeMap::new(),
        }
    }

    pub fn word(cartan: Arc<CartanData>, source: Weight, word: FormalWord) -> Result<Self, RewriteError> {
        let mut sum = Self::zero(cartan, source);
        sum.add_term(word, LaurentPoly::one())?;
        Ok(sum)
    }

    pub fn parse(text: &str, cartan: Arc<CartanData>, anchor: Option<&Weight>) -> Result<Self, RewriteError> {
        parse_sum(text, cartan, anchor)
    }

    pub fn cartan(&self) -> &Arc<CartanData> {
        &self.cartan
    }

    pub fn source(&self) -> &Weight {
        &self.source
    }

    /// `None` for the zero sum.
    pub fn target(&self) -> Option<Weight> {
        let shift = self.shift.as_ref()?;
        let mut w = self.source.clone();
        for (k, &s) in shift.iter().enumerate() {
            if s != 0 {
                w = self.cartan.shift_by_root(&w, k + 1, s);
            }
        }
        Some(w)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormalWord, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coefficient(&self, word: &FormalWord) -> LaurentPoly {
        self.terms.get(word).cloned().unwrap_or_else(LaurentPoly::zero)
    }

    pub fn add_term(&mut self, word: FormalWord, coeff: LaurentPoly) -> Result<(), RewriteError> {
        let rank = self.cartan.rank();
        for l in word.letters() {
            self.cartan.check_index(l.index)?;
        }
        let shift = word.shift(rank);
        match &self.shift {
            Some(expected) if *expected != shift => {
                let show = |s: &[i64]| format!("{:?}", s);
                return Err(RewriteError::IncompatibleWeights {
                    word: word.to_string(),
                    expected: show(expected),
                    got: show(&shift),
                });
            }
            Some(_) => {}
            None => self.shift = Some(shift),
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let entry = self.terms.entry(word.clone()).or_insert_with(LaurentPoly::zero);
        *entry += &coeff;
        if entry.is_zero() {
            self.terms.remove(&word);
        }
        Ok(())
    }

    /// Drops words whose intermediate content leaves `N^n`.
    pub fn prune_null(&self) -> Self {
        let mut out = self.empty_like();
        for (w, c) in &self.terms {
            if !w.is_null(&self.cartan, &self.source) {
                out.terms.insert(w.clone(), c.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        let mut out = self.empty_like();
        if c.is_zero() {
            return out;
        }
        for (w, x) in &self.terms {
            out.terms.insert(w.clone(), x * c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RewriteError> {
        self.check_anchor(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c.clone())?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self, RewriteError> {
        self.check_anchor(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone())?;
        }
        Ok(out)
    }

    fn check_anchor(&self, other: &Self) -> Result<(), RewriteError> {
        if self.source.pairings() != other.source.pairings() {
            return Err(RewriteError::AnchorMismatch {
                left: self.source.to_string(),
                right: other.source.to_string(),
            });
        }
        Ok(())
    }

    fn empty_like(&self) -> Self {
        Self {
            cartan: self.cartan.clone(),
            source: self.source.clone(),
            shift: self.shift.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// Evaluates the sum as a matrix on the weight space of the anchor.
    pub fn evaluate(&self, module: &WeightModule) -> Result<OperatorMatrix, RewriteError> {
        let content = realizable_anchor(&self.source, module)?;
        let mut acc: Option<OperatorMatrix> = None;
        for (w, c) in &self.terms {
            let m = module.word_matrix(w.letters(), &content)?.scale(c);
            acc = Some(match acc {
                None => m,
                Some(a) => a.add(&m)?,
            });
        }
        match acc {
            Some(a) => Ok(a),
            None => {
                let target = self.target().and_then(|t| t.content().cloned()).unwrap_or_else(|| content.clone());
                Ok(OperatorMatrix::new(
                    content.clone(),
                    target.clone(),
                    crate::linalg::SparseMatrix::zeros(module.dim(&target), module.dim(&content)),
                ))
            }
        }
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "({c}) * {w}")?;
            }
        }
        write!(f, " @ {}", self.source)
    }
}

fn realizable_anchor(source: &Weight, module: &WeightModule) -> Result<Content, RewriteError> {
    let unrealizable = || RewriteError::Unrealizable {
        weight: source.to_string(),
        n: module.n(),
        len: module.len(),
    };
    let content = source.content().ok_or_else(unrealizable)?;
    if content.n() != module.n() || content.total() != module.len() as i64 || !content.is_dominant_realizable() {
        return Err(unrealizable());
    }
    Ok(content.clone())
}

/// Compares two sums through the tensor model.
pub fn oracle_equal(a: &FormalSum, b: &FormalSum, module: &WeightModule) -> Result<VerificationReport, RewriteError> {
    a.check_anchor(b)?;
    realizable_anchor(&a.source, module)?;
    realizable_anchor(&b.source, module)?;
    let mut run = CheckRun::start("rewrite_oracle", "oracle", Params::module(module.n(), module.len()));
    let lhs = a.evaluate(module)?;
    let rhs = b.evaluate(module)?;
    let same_shape = lhs.target() == rhs.target() || (lhs.is_zero() && rhs.is_zero());
    let ok = same_shape && lhs.sub(&rhs).map(|d| d.is_zero()).unwrap_or(false);
    run.record(ok, || Counterexample {
        weight: a.source.to_string(),
        words: vec![a.to_string(), b.to_string()],
        lhs: lhs.to_text(),
        rhs: rhs.to_text(),
    });
    Ok(run.finish())
}

/// A random word of length `1..=max_len` over indices `1..=rank`.
pub fn random_word(rng: &mut impl Rng, rank: usize, max_len: usize, max_power: u32) -> FormalWord {
    let len = rng.gen_range(1..=max_len);
    let letters = (0..len)
        .map(|_| {
            let index = rng.gen_range(1..=rank);
            let power = rng.gen_range(1..=max_power);
            if rng.gen_bool(0.5) {
                Letter::e(index, power)
            } else {
                Letter::f(index, power)
            }
        })
        .collect();
    FormalWord::new(letters)
}

/// A random composition of `len` into `n` parts.
pub fn random_content(rng: &mut impl Rng, n: usize, len: usize) -> Content {
    let mut parts = vec![0i64; n];
    for _ in 0..len {
        parts[rng.gen_range(0..n)] += 1;
    }
    Content(parts)
}

/// Parameters for the randomized rewrite checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomWords {
    /// `(n, N)` modules; each word picks one.
    pub modules: Vec<(usize, usize)>,
    pub words: usize,
    pub max_len: usize,
    pub max_power: u32,
    pub seed: u64,
}

const SAMPLE_RETRIES: usize = 64;

impl RandomWords {
    fn params(&self) -> Params {
        let (n, len) = self.modules.iter().copied().max().unwrap_or((0, 0));
        let mut p = Params::module(n, len);
        p.extra.insert("words".into(), self.words as i64);
        p.extra.insert("max_len".into(), self.max_len as i64);
        p.extra.insert("max_power".into(), self.max_power as i64);
        p
    }

    fn build(&self) -> Result<Vec<(Arc<CartanData>, WeightModule)>, RewriteError> {
        self.modules
            .iter()
            .map(|&(n, len)| Ok((Arc::new(CartanData::type_a(n - 1)), crate::tensor_rep::build_module(n, len)?)))
            .collect()
    }

    /// Deterministic sample: module index and anchored word.
    fn sample(&self, mods: &[(Arc<CartanData>, WeightModule)], rng: &mut impl Rng) -> (usize, FormalSum) {
        let k = rng.gen_range(0..mods.len());
        let (cartan, m) = &mods[k];
        // most uniform words are null at a random anchor; retry a bounded number of times
        let mut pick = || {
            let anchor = Weight::from_content(random_content(rng, m.n(), m.len()));
            let word = random_word(rng, cartan.rank(), self.max_len, self.max_power);
            (anchor, word)
        };
        let (mut anchor, mut word) = pick();
        for _ in 0..SAMPLE_RETRIES {
            if !word.is_null(cartan, &anchor) {
                break;
            }
            (anchor, word) = pick();
        }
        let sum = FormalSum::word(cartan.clone(), anchor, word).expect("random word over the right rank");
        (k, sum)
    }
}

fn equal_on(a: &FormalSum, b: &FormalSum, m: &WeightModule) -> Result<Option<Counterexample>, RewriteError> {
    let lhs = a.evaluate(m)?;
    let rhs = b.evaluate(m)?;
    let same = (lhs.is_zero() && rhs.is_zero()) || lhs.sub(&rhs).map(|d| d.is_zero()).unwrap_or(false);
    Ok((!same).then(|| Counterexample {
        weight: a.source().to_string(),
        words: vec![a.to_string(), b.to_string()],
        lhs: lhs.to_text(),
        rhs: rhs.to_text(),
    }))
}

/// Each random word equals its normal form under the tensor oracle; the
/// measure check inside `normal_form_with` covers termination.
pub fn check_soundness(spec: &RandomWords, order: &[Rule]) -> Result<VerificationReport, RewriteError> {
    use rand::SeedableRng;
    use rayon::prelude::*;
    let mut run = CheckRun::start("rewrite_soundness", "oracle", spec.params());
    let mods = spec.build()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.seed);
    let samples: Vec<(usize, FormalSum)> = (0..spec.words).map(|_| spec.sample(&mods, &mut rng)).collect();
    type Outcome = (usize, bool, Option<Counterexample>);
    let outcomes: Vec<Result<Outcome, RewriteError>> = samples
        .par_iter()
        .map(|(k, sum)| {
            let nf = normal_form_with(sum, order, DEFAULT_STEP_CAP)?;
            let live = !sum.is_zero() && !nf.sum.is_zero();
            Ok((nf.steps, live, equal_on(sum, &nf.sum, &mods[*k].1)?))
        })
        .collect();
    let mut max_steps = 0;
    let mut nonzero = 0;
    let mut run_outcomes = Vec::new();
    for o in outcomes {
        let (steps, live, cx) = o?;
        max_steps = max_steps.max(steps);
        nonzero += live as i64;
        run_outcomes.push(cx);
    }
    run.params_mut().extra.insert("max_steps".into(), max_steps as i64);
    run.params_mut().extra.insert("nonzero".into(), nonzero);
    for cx in run_outcomes {
        match cx {
            None => run.record_case(),
            Some(cx) => run.fail_case(cx),
        }
    }
    Ok(run.finish().with_seed(spec.seed))
}

/// Normal forms under shuffled rule priorities agree with the default one
/// under the tensor oracle.
pub fn check_confluence(spec: &RandomWords) -> Result<VerificationReport, RewriteError> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rayon::prelude::*;
    let mut run = CheckRun::start("rewrite_confluence", "oracle", spec.params());
    let mods = spec.build()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.seed);
    let samples: Vec<(usize, FormalSum, Vec<Rule>)> = (0..spec.words)
        .map(|_| {
            let (k, sum) = spec.sample(&mods, &mut rng);
            let mut order = Rule::ALL.to_vec();
            order.shuffle(&mut rng);
            (k, sum, order)
        })
        .collect();
    let outcomes: Vec<Result<Option<Counterexample>, RewriteError>> = samples
        .par_iter()
        .map(|(k, sum, order)| {
            let a = normal_form(sum)?;
            let b = normal_form_with(sum, order, DEFAULT_STEP_CAP)?;
            equal_on(&a.sum, &b.sum, &mods[*k].1)
        })
        .collect();
    for o in outcomes {
        match o? {
            None => run.record_case(),
            Some(cx) => run.fail_case(cx),
        }
    }
    Ok(run.finish().with_seed(spec.seed))
}

/// The terms without the anchor, e.g. `(1*q^-1 + 1*q^1) * E1^(2)`.
pub fn terms_text(sum: &FormalSum) -> String {
    let text = sum.to_string();
    match text.rfind(" @ ") {
        Some(k) => text[..k].to_string(),
        None => text,
    }
}
