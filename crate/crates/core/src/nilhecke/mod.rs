//! Nil affine Hecke and two-colour KLR relations on polynomial
//! representations. Dots are multiplication by variables; same-colour
//! crossings are divided-difference operators.

mod poly;

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::cartan::CartanData;
use crate::report::{CheckRun, Counterexample, Params, VerificationReport};

pub use poly::{monomials_up_to, MultiPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NilheckeError {
    #[error("crossing position {k} out of range for {strands} strands")]
    Position { k: usize, strands: usize },
    #[error("colour {0} is not a vertex of the graph")]
    Colour(usize),
    #[error("need at least {need} strands, got {got}")]
    TooFewStrands { need: usize, got: usize },
    #[error("polynomial has {got} variables, word has {expected} strands")]
    Arity { expected: usize, got: usize },
}

/// `d_k f = (f - s_k f) / (x_k - x_{k+1})`.
pub fn demazure(k: usize, f: &MultiPoly) -> MultiPoly {
    assert!(k >= 1 && k < f.vars(), "demazure position {k} out of range");
    let diff = f - &f.swap(k);
    diff.div_by_difference(k).expect("f - s_k f is divisible by x_k - x_{k+1}")
}

/// Colours of the strands, left to right.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColoredWord(pub Vec<usize>);

impl ColoredWord {
    pub fn new(colours: Vec<usize>, cartan: &CartanData) -> Result<Self, NilheckeError> {
        for &c in &colours {
            if cartan.check_index(c).is_err() {
                return Err(NilheckeError::Colour(c));
            }
        }
        Ok(Self(colours))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn swapped(&self, k: usize) -> Self {
        let mut c = self.0.clone();
        c.swap(k - 1, k);
        Self(c)
    }
}

impl fmt::Display for ColoredWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A vector in `sum_w k[x_1..x_m]`, one polynomial per coloured word.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KlrElement(BTreeMap<ColoredWord, MultiPoly>);

impl KlrElement {
    pub fn single(word: ColoredWord, f: MultiPoly) -> Self {
        let mut out = Self::default();
        out.add(word, f);
        out
    }

    pub fn components(&self) -> impl Iterator<Item = (&ColoredWord, &MultiPoly)> {
        self.0.iter()
    }

    pub fn component(&self, word: &ColoredWord) -> Option<&MultiPoly> {
        self.0.get(word)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add(&mut self, word: ColoredWord, f: MultiPoly) {
        if f.is_zero() {
            return;
        }
        let sum = match self.0.remove(&word) {
            Some(g) => &g + &f,
            None => f,
        };
        if !sum.is_zero() {
            self.0.insert(word, sum);
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, f) in &other.0 {
            out.add(w.clone(), f.clone());
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, f) in &other.0 {
            out.add(w.clone(), -f);
        }
        out
    }

    /// Multiplies every component by `x_k`.
    pub fn dot(&self, k: usize) -> Self {
        let mut out = Self::default();
        for (w, f) in &self.0 {
            out.add(w.clone(), f.mul_var(k));
        }
        out
    }

    /// Applies the crossing at `k` to every component.
    pub fn cross(&self, cartan: &CartanData, k: usize) -> Result<Self, NilheckeError> {
        let mut out = Self::default();
        for (w, f) in &self.0 {
            out = out.plus(&klr_crossing(cartan, w, k, f)?);
        }
        Ok(out)
    }
}

impl fmt::Display for KlrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, p)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{w}: {p}")?;
        }
        Ok(())
    }
}

/// `Q(u, v) = u + v` on adjacent colours.
fn q_factor(f: &MultiPoly, k: usize) -> MultiPoly {
    &f.mul_var(k) + &f.mul_var(k + 1)
}

/// The crossing of strands `k, k+1` on the component `(w, f)`.
///
/// Equal colours act by `d_k`. Distinct colours swap variables and colours;
/// for adjacent colours `a > b` the result is also multiplied by
/// `x_k + x_{k+1}`, so `a < b` crossings are free.
pub fn klr_crossing(cartan: &CartanData, w: &ColoredWord, k: usize, f: &MultiPoly) -> Result<KlrElement, NilheckeError> {
    if k == 0 || k >= w.len() {
        return Err(NilheckeError::Position { k, strands: w.len() });
    }
    if f.vars() != w.len() {
        return Err(NilheckeError::Arity {
            expected: w.len(),
            got: f.vars(),
        });
    }
    let (a, b) = (w.0[k - 1], w.0[k]);
    if a == b {
        return Ok(KlrElement::single(w.clone(), demazure(k, f)));
    }
    let swapped = f.swap(k);
    let value = if a > b && cartan.adjacent(a, b) {
        q_factor(&swapped, k)
    } else {
        swapped
    };
    Ok(KlrElement::single(w.swapped(k), value))
}

/// Which test polynomials a check runs on: every monomial up to
/// `degree_bound` plus `random` seeded random polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Samples {
    pub degree_bound: u32,
    pub random: usize,
    pub seed: u64,
}

impl Samples {
    pub fn new(degree_bound: u32, random: usize, seed: u64) -> Self {
        Self {
            degree_bound,
            random,
            seed,
        }
    }

    pub fn polynomials(&self, vars: usize) -> Vec<MultiPoly> {
        let monos = monomials_up_to(vars, self.degree_bound);
        let mut out: Vec<MultiPoly> = monos.iter().map(|e| MultiPoly::monomial(vars, e.clone(), 1)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random {
            let mut f = MultiPoly::zero(vars);
            for _ in 0..rng.gen_range(1..=5) {
                let e = monos[rng.gen_range(0..monos.len())].clone();
                let c = rng.gen_range(-7i64..=7);
                f = &f + &MultiPoly::monomial(vars, e, c);
            }
            out.push(f);
        }
        out
    }
}

type Identity<'a> = (&'a str, Box<dyn Fn(&MultiPoly) -> (MultiPoly, MultiPoly) + Sync + Send + 'a>);

fn run_identities(run: &mut CheckRun, samples: &[MultiPoly], identities: &[Identity<'_>]) {
    let results: Vec<Vec<Option<Counterexample>>> = samples
        .par_iter()
        .map(|f| {
            identities
                .iter()
                .map(|(name, id)| {
                    let (lhs, rhs) = id(f);
                    (lhs != rhs).then(|| Counterexample {
                        weight: f.to_string(),
                        words: vec![name.to_string()],
                        lhs: lhs.to_string(),
                        rhs: rhs.to_string(),
                    })
                })
                .collect()
        })
        .collect();
    for per_sample in results {
        for failure in per_sample {
            match failure {
                None => run.record_case(),
                Some(cx) => run.fail_case(cx),
            }
        }
    }
}

/// Nil affine Hecke relations on `k[x_1..x_m]`: `d_k^2 = 0`, the braid
/// relation, both dot-sliding relations, and the degree drop of `d_k`.
pub fn check_nilhecke(m: usize, samples: Samples) -> Result<VerificationReport, NilheckeError> {
    if m < 2 {
        return Err(NilheckeError::TooFewStrands { need: 2, got: m });
    }
    let params = Params::default()
        .with("m", m as i64)
        .with("degree_bound", samples.degree_bound as i64)
        .with("random", samples.random as i64);
    let mut run = CheckRun::start("nilhecke", "rel-i", params);
    let polys = samples.polynomials(m);
    let mut identities: Vec<Identity<'_>> = Vec::new();
    for k in 1..m {
        identities.push((
            "d_k d_k = 0",
            Box::new(move |f| (demazure(k, &demazure(k, f)), MultiPoly::zero(f.vars()))),
        ));
        identities.push((
            "x_k d_k - d_k x_{k+1} = 1",
            Box::new(move |f| (&demazure(k, f).mul_var(k) - &demazure(k, &f.mul_var(k + 1)), f.clone())),
        ));
        identities.push((
            "-x_{k+1} d_k + d_k x_k = 1",
            Box::new(move |f| (&demazure(k, &f.mul_var(k)) - &demazure(k, f).mul_var(k + 1), f.clone())),
        ));
        identities.push((
            "deg d_k f = deg f - 2",
            Box::new(move |f| {
                let ok = f.terms().all(|(e, _)| {
                    let out = demazure(k, &MultiPoly::monomial(f.vars(), e.clone(), 1));
                    out.is_zero() || out.internal_degree() == Some(2 * e.iter().sum::<u32>() - 2)
                });
                (MultiPoly::constant(f.vars(), ok as i64), MultiPoly::one(f.vars()))
            }),
        ));
    }
    for k in 1..m.saturating_sub(1) {
        identities.push((
            "d_k d_{k+1} d_k = d_{k+1} d_k d_{k+1}",
            Box::new(move |f| {
                (
                    demazure(k, &demazure(k + 1, &demazure(k, f))),
                    demazure(k + 1, &demazure(k, &demazure(k + 1, f))),
                )
            }),
        ));
    }
    run_identities(&mut run, &polys, &identities);
    let mut report = run.finish();
    report.seed = Some(samples.seed);
    Ok(report)
}

/// Double crossing on the two-strand word `(i, j)`: multiplication by
/// `x_1 + x_2` for adjacent colours, the identity for distant ones and zero
/// for equal ones.
pub fn check_klr_edge_relation(
    cartan: &CartanData,
    i: usize,
    j: usize,
    samples: Samples,
) -> Result<VerificationReport, NilheckeError> {
    let word = ColoredWord::new(vec![i, j], cartan)?;
    let (check, citation) = if i == j {
        ("klr_same_colour", "rel-i")
    } else if cartan.adjacent(i, j) {
        ("klr_edge_relation", "rel-ii")
    } else {
        ("klr_distant_identity", "rel-ii")
    };
    let params = Params::default()
        .with_i(i)
        .with_j(j)
        .with("degree_bound", samples.degree_bound as i64)
        .with("random", samples.random as i64);
    let mut run = CheckRun::start(check, citation, params);
    let polys = samples.polynomials(2);
    let expected = |f: &MultiPoly| -> KlrElement {
        if i == j {
            KlrElement::default()
        } else if cartan.adjacent(i, j) {
            KlrElement::single(word.clone(), q_factor(f, 1))
        } else {
            KlrElement::single(word.clone(), f.clone())
        }
    };
    let outcomes: Vec<(KlrElement, KlrElement)> = polys
        .par_iter()
        .map(|f| {
            let once = klr_crossing(cartan, &word, 1, f).expect("two strands");
            let twice = once.cross(cartan, 1).expect("two strands");
            (twice, expected(f))
        })
        .collect();
    for (f, (lhs, rhs)) in polys.iter().zip(outcomes) {
        run.record(lhs == rhs, || Counterexample {
            weight: f.to_string(),
            words: vec![word.to_string()],
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        });
    }
    let mut report = run.finish();
    report.seed = Some(samples.seed);
    Ok(report)
}

/// The composite `(I T_ii)(T_ij I)(T_ji I)(I T_ii)` on the word `(j, i, i)`.
/// `skip` drops one of the four factors (0 = rightmost) as a control.
fn theorem_composite(cartan: &CartanData, word: &ColoredWord, f: &MultiPoly, skip: Option<usize>) -> KlrElement {
    let mut v = KlrElement::single(word.clone(), f.clone());
    for (step, k) in [2usize, 1, 1, 2].into_iter().enumerate() {
        if skip == Some(step) {
            continue;
        }
        v = v.cross(cartan, k).expect("three strands");
    }
    v
}

/// Checks `(I T_ii)(T_ij I)(T_ji I)(I T_ii) = I T_ii` on `(j, i, i)` for an
/// adjacent pair, together with the intermediate chain
/// `d_2 (x_1 + x_2) d_2 = x_1 d_2^2 + d_2 (d_2 x_3 + 1) = d_2`.
/// `skip` removes one factor of the composite, which must then fail.
pub fn check_theorem6_computation_with(
    cartan: &CartanData,
    i: usize,
    j: usize,
    samples: Samples,
    skip: Option<usize>,
) -> Result<VerificationReport, NilheckeError> {
    let word = ColoredWord::new(vec![j, i, i], cartan)?;
    let mut params = Params::default()
        .with_i(i)
        .with_j(j)
        .with("degree_bound", samples.degree_bound as i64)
        .with("random", samples.random as i64);
    if let Some(s) = skip {
        params = params.with("skip", s as i64);
    }
    let mut run = CheckRun::start("theorem_composite", "thm-6.1", params);
    if i == j || !cartan.adjacent(i, j) {
        return Ok(run.skipped("needs an adjacent pair"));
    }
    let polys = samples.polynomials(3);
    let outcomes: Vec<Vec<(bool, String, String, &str)>> = polys
        .par_iter()
        .map(|f| {
            let composite = theorem_composite(cartan, &word, f, skip);
            let target = KlrElement::single(word.clone(), demazure(2, f));
            let d2f = demazure(2, f);
            let step1 = demazure(2, &(&d2f.mul_var(1) + &d2f.mul_var(2)));
            let step2 = &demazure(2, &d2f).mul_var(1) + &demazure(2, &(&demazure(2, &f.mul_var(3)) + f));
            vec![
                (composite == target, composite.to_string(), target.to_string(), "composite"),
                (
                    KlrElement::single(word.clone(), step1.clone()) == composite,
                    step1.to_string(),
                    composite.to_string(),
                    "dot insertion",
                ),
                (step1 == step2, step1.to_string(), step2.to_string(), "dot slide"),
                (step2 == d2f, step2.to_string(), d2f.to_string(), "d^2 = 0"),
            ]
        })
        .collect();
    for (f, checks) in polys.iter().zip(outcomes) {
        for (ok, lhs, rhs, name) in checks {
            run.record(ok, || Counterexample {
                weight: f.to_string(),
                words: vec![word.to_string(), name.to_string()],
                lhs,
                rhs,
            });
        }
    }
    let mut report = run.finish();
    report.seed = Some(samples.seed);
    Ok(report)
}

pub fn check_theorem6_computation(cartan: &CartanData, samples: Samples) -> Result<VerificationReport, NilheckeError> {
    let (i, j) = cartan
        .graph()
        .edges()
        .next()
        .ok_or(NilheckeError::TooFewStrands { need: 2, got: cartan.rank() })?;
    check_theorem6_computation_with(cartan, i, j, samples, None)
}

#[cfg(test)]
mod tests;
