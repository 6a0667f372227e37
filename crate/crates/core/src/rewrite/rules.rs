use std::fmt;

use super::{FormalSum, FormalWord, RewriteError};
use crate::cartan::{CartanData, Weight};
use crate::qalg::{qbinom, qbinom_general, LaurentPoly};
use crate::tensor_rep::{Letter, LetterKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Merge,
    CommuteDistant,
    StraightenEf,
    Serre,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::Merge, Rule::CommuteDistant, Rule::StraightenEf, Rule::Serre];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Merge => "merge",
            Rule::CommuteDistant => "commute_distant",
            Rule::StraightenEf => "straighten_ef",
            Rule::Serre => "serre",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const DEFAULT_ORDER: [Rule; 4] = Rule::ALL;
pub const DEFAULT_STEP_CAP: usize = 200_000;

/// Termination measure of a word, compared lexicographically: pairs with an
/// `E` left of an `F`, then letter count, then same-type pairs out of index
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Measure {
    pub ef_inversions: usize,
    pub letters: usize,
    pub index_inversions: usize,
}

impl Measure {
    pub fn of(word: &FormalWord) -> Self {
        let w = word.letters();
        let mut ef = 0;
        let mut idx = 0;
        for p in 0..w.len() {
            for q in p + 1..w.len() {
                if w[p].kind == LetterKind::E && w[q].kind == LetterKind::F {
                    ef += 1;
                }
                if w[p].kind == w[q].kind && w[p].index > w[q].index {
                    idx += 1;
                }
            }
        }
        Measure {
            ef_inversions: ef,
            letters: w.len(),
            index_inversions: idx,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.ef_inversions, self.letters, self.index_inversions)
    }
}

type Replacement = Vec<(LaurentPoly, Vec<Letter>)>;

fn with_power(l: Letter, power: u32) -> Option<Letter> {
    (power > 0).then_some(Letter { power, ..l })
}

/// The rewrite of the segment starting at `p`, if `rule` matches there.
/// `flow[p]` is the weight letter `p` acts on.
fn redex_at(rule: Rule, cartan: &CartanData, w: &[Letter], flow: &[Weight], p: usize) -> Option<(usize, Replacement)> {
    let (l, r) = (w[p], *w.get(p + 1)?);
    match rule {
        Rule::Merge => (l.kind == r.kind && l.index == r.index).then(|| {
            let total = l.power + r.power;
            (2, vec![(qbinom(total as i64, l.power as i64), vec![with_power(l, total).expect("positive")])])
        }),
        Rule::CommuteDistant => {
            let swap = if l.kind != r.kind {
                l.kind == LetterKind::E && l.index != r.index
            } else {
                l.index > r.index && !cartan.adjacent(l.index, r.index)
            };
            swap.then(|| (2, vec![(LaurentPoly::one(), vec![r, l])]))
        }
        Rule::StraightenEf => {
            if l.kind != LetterKind::E || r.kind != LetterKind::F || l.index != r.index {
                return None;
            }
            let (b, a) = (l.power as i64, r.power as i64);
            let top = flow[p + 1].pairing(r.index) - a + b;
            let mut out = Vec::new();
            for j in 0..=a.min(b) {
                let c = qbinom_general(top, j);
                if c.is_zero() {
                    continue;
                }
                let letters = [with_power(r, (a - j) as u32), with_power(l, (b - j) as u32)];
                out.push((c, letters.into_iter().flatten().collect()));
            }
            Some((2, out))
        }
        Rule::Serre => {
            let far = *w.get(p + 2)?;
            if l.kind != r.kind || far.kind != l.kind || l.index != far.index || r.power != 1 {
                return None;
            }
            if !cartan.adjacent(l.index, r.index) {
                return None;
            }
            let (a, b) = (l.power as i64, far.power as i64);
            let merged = with_power(l, (a + b) as u32).expect("positive");
            Some((
                3,
                vec![
                    (qbinom(a + b - 1, b), vec![merged, r]),
                    (qbinom(a + b - 1, a), vec![r, merged]),
                ],
            ))
        }
    }
}

/// Leftmost redex of the first rule in `order` that matches anywhere.
fn rewrite_word(
    cartan: &CartanData,
    source: &Weight,
    word: &FormalWord,
    order: &[Rule],
) -> Option<(Rule, Vec<(LaurentPoly, FormalWord)>)> {
    let w = word.letters();
    let flow = word.weight_flow(cartan, source);
    for &rule in order {
        for p in 0..w.len() {
            if let Some((width, replacement)) = redex_at(rule, cartan, w, &flow, p) {
                let out = replacement
                    .into_iter()
                    .map(|(c, mid)| {
                        let mut letters = w[..p].to_vec();
                        letters.extend(mid);
                        letters.extend_from_slice(&w[p + width..]);
                        (c, FormalWord::new(letters))
                    })
                    .collect();
                return Some((rule, out));
            }
        }
    }
    None
}

/// One sweep over every term. Returns the new sum and how many terms changed.
fn pass(sum: &FormalSum, order: &[Rule], check_measure: bool) -> Result<(FormalSum, usize), RewriteError> {
    let mut out = sum.empty_like();
    let mut changed = 0;
    for (word, coeff) in sum.terms() {
        match rewrite_word(sum.cartan(), sum.source(), word, order) {
            Some((rule, pieces)) => {
                changed += 1;
                let before = Measure::of(word);
                for (c, piece) in pieces {
                    let after = Measure::of(&piece);
                    if check_measure && after >= before {
                        return Err(RewriteError::MeasureIncrease {
                            rule: rule.name(),
                            before: before.to_string(),
                            after: after.to_string(),
                            term: word.to_string(),
                        });
                    }
                    out.add_term(piece, coeff * &c)?;
                }
            }
            None => out.add_term(word.clone(), coeff.clone())?,
        }
    }
    Ok((out, changed))
}

fn single_rule_fixpoint(sum: &FormalSum, rule: Rule) -> FormalSum {
    let mut current = sum.clone();
    loop {
        let (next, changed) = pass(&current, &[rule], false).expect("terms keep the sum's weights");
        if changed == 0 {
            return next;
        }
        current = next;
    }
}

/// `E_i^{(r1)} E_i^{(r2)} -> [r1+r2 choose r1] E_i^{(r1+r2)}`, and the same for
/// `F`, to fixpoint.
pub fn rule_merge_divided(sum: &FormalSum) -> FormalSum {
    single_rule_fixpoint(sum, Rule::Merge)
}

/// Moves `F_j` left past `E_i` for `i != j` and sorts non-adjacent same-type
/// letters by index, to fixpoint.
pub fn rule_commute_distant(sum: &FormalSum) -> FormalSum {
    single_rule_fixpoint(sum, Rule::CommuteDistant)
}

/// `E_i^{(b)} F_i^{(a)} -> sum_j [d-a+b choose j] F_i^{(a-j)} E_i^{(b-j)}` with
/// `d` the pairing of the weight the `F` acts on, to fixpoint.
pub fn rule_straighten_ef(sum: &FormalSum) -> FormalSum {
    single_rule_fixpoint(sum, Rule::StraightenEf)
}

/// Splits `X_i^{(a)} X_j X_i^{(b)}` for adjacent `i, j`; one left-to-right
/// pass.
pub fn rule_serre(sum: &FormalSum) -> FormalSum {
    pass(sum, &[Rule::Serre], false).expect("terms keep the sum's weights").0
}

#[derive(Debug, Clone)]
pub struct NormalForm {
    pub sum: FormalSum,
    pub steps: usize,
    pub passes: usize,
}

pub fn normal_form(sum: &FormalSum) -> Result<NormalForm, RewriteError> {
    normal_form_with(sum, &DEFAULT_ORDER, DEFAULT_STEP_CAP)
}

/// Applies the rules in `order` (earlier wins) to fixpoint, dropping null
/// words after every pass. Every rewrite is checked to lower [`Measure`].
pub fn normal_form_with(sum: &FormalSum, order: &[Rule], step_cap: usize) -> Result<NormalForm, RewriteError> {
    let mut current = sum.prune_null();
    let mut steps = 0;
    let mut passes = 0;
    loop {
        let (next, changed) = pass(&current, order, true)?;
        passes += 1;
        steps += changed;
        let next = next.prune_null();
        if changed == 0 {
            return Ok(NormalForm {
                sum: next,
                steps,
                passes,
            });
        }
        if steps > step_cap {
            let stuck = next
                .terms()
                .find(|(w, _)| rewrite_word(next.cartan(), next.source(), w, order).is_some())
                .map(|(w, _)| w.to_string())
                .unwrap_or_default();
            return Err(RewriteError::IterationCap { steps, term: stuck });
        }
        current = next;
    }
}
