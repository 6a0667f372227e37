//! Exact operator identities checked weight space by weight space.

use rayon::prelude::*;

use super::{Letter, LetterKind, OperatorMatrix, TensorError, WeightModule};
use crate::cartan::Content;
use crate::qalg::{qbinom, LaurentPoly};
use crate::report::{CheckRun, Counterexample, Params, VerificationReport};

/// A `Z[q, q^-1]`-combination of letter words.
type Combination = Vec<(LaurentPoly, Vec<Letter>)>;

fn describe(side: &Combination) -> String {
    if side.is_empty() {
        return "0".to_string();
    }
    side.iter()
        .map(|(c, w)| {
            let word: Vec<String> = w.iter().map(|l| l.to_string()).collect();
            let word = if word.is_empty() { "id".to_string() } else { word.join(" ") };
            if c.is_one() {
                word
            } else {
                format!("({c}) * {word}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Matrix of a combination on `weight`. Every word must shift the weight by
/// the same amount; `target` names that common target.
fn evaluate(m: &WeightModule, side: &Combination, weight: &Content, target: &Content) -> Result<OperatorMatrix, TensorError> {
    let mut acc = OperatorMatrix::new(
        weight.clone(),
        target.clone(),
        crate::linalg::SparseMatrix::zeros(m.dim(target), m.dim(weight)),
    );
    for (coeff, word) in side {
        let term = m.word_matrix(word, weight)?.scale(coeff);
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

fn shift(weight: &Content, letters: &[Letter]) -> Content {
    letters
        .iter()
        .fold(weight.clone(), |w, l| w.add_root(l.index, l.kind.sign() * l.power as i64))
}

/// Compares the two sides on one weight space.
fn compare_at(m: &WeightModule, lhs: &Combination, rhs: &Combination, weight: &Content) -> Result<Option<Counterexample>, TensorError> {
    let Some((_, first)) = lhs.iter().chain(rhs).next() else {
        return Ok(None);
    };
    let target = shift(weight, first);
    let left = evaluate(m, lhs, weight, &target)?;
    let right = evaluate(m, rhs, weight, &target)?;
    if left == right {
        return Ok(None);
    }
    Ok(Some(Counterexample {
        weight: weight.to_string(),
        words: vec![describe(lhs), describe(rhs)],
        lhs: left.matrix().to_text(),
        rhs: right.matrix().to_text(),
    }))
}

/// Runs `identities(weight)` on every weight space in parallel and reports the
/// first failure in basis order, so the outcome does not depend on scheduling.
fn sweep<F>(m: &WeightModule, check: &str, citation: &str, params: Params, identities: F) -> Result<VerificationReport, TensorError>
where
    F: Fn(&Content) -> Vec<(Combination, Combination)> + Sync + Send,
{
    let mut run = CheckRun::start(check, citation, params);
    let outcomes: Vec<Result<Option<Counterexample>, TensorError>> = m
        .weights()
        .par_iter()
        .map(|weight| {
            for (lhs, rhs) in identities(weight) {
                if let Some(cx) = compare_at(m, &lhs, &rhs, weight)? {
                    return Ok(Some(cx));
                }
            }
            Ok(None)
        })
        .collect();
    for outcome in outcomes {
        match outcome? {
            Some(cx) => run.fail_case(cx),
            None => run.record_case(),
        }
    }
    Ok(run.finish())
}

fn word(letters: &[Letter]) -> Combination {
    vec![(LaurentPoly::one(), letters.to_vec())]
}

fn params(m: &WeightModule) -> Params {
    Params::module(m.n(), m.len())
}

/// `X^{(r1)} X^{(r2)} = [r1+r2 choose r1] X^{(r1+r2)}` for `X = E_i` and `X = F_i`.
pub fn verify_divided_power_rule(m: &WeightModule, i: usize, r1: u32, r2: u32) -> Result<VerificationReport, TensorError> {
    m.check_index(i)?;
    let coeff = qbinom((r1 + r2) as i64, r1 as i64);
    let p = params(m).with_i(i).with("r1", r1 as i64).with("r2", r2 as i64);
    sweep(m, "divided_power_rule", "prop-4.1", p, |_| {
        [LetterKind::E, LetterKind::F]
            .into_iter()
            .map(|kind| {
                let l = |r| Letter { kind, index: i, power: r };
                (word(&[l(r1), l(r2)]), vec![(coeff.clone(), vec![l(r1 + r2)])])
            })
            .collect()
    })
}

/// The straightening identity on one weight `λ`, with `d = <λ, α_i>`:
///
/// ```text
/// E^{(b)} F^{(a)} = Σ_j [d - a + b choose j] F^{(a-j)} E^{(b-j)}      if d - a + b >= 0
/// F^{(a)} E^{(b)} = Σ_j [a - b - d choose j] E^{(b-j)} F^{(a-j)}      otherwise
/// ```
fn straightening(i: usize, a: u32, b: u32, weight: &Content) -> (Combination, Combination) {
    let d = weight.pairing(i);
    let top = d - a as i64 + b as i64;
    let terms = |top: i64, first: fn(usize, u32) -> Letter, second: fn(usize, u32) -> Letter| -> Combination {
        (0..=a.min(b))
            .map(|j| (qbinom(top, j as i64), vec![first(i, a - j), second(i, b - j)]))
            .map(|(c, w)| (c, w.into_iter().filter(|l| l.power > 0).collect()))
            .filter(|(c, _)| !c.is_zero())
            .collect()
    };
    if top >= 0 {
        (word(&[Letter::e(i, b), Letter::f(i, a)]), terms(top, Letter::f, Letter::e))
    } else {
        let mirrored: Combination = terms(-top, Letter::f, Letter::e)
            .into_iter()
            .map(|(c, mut w)| {
                w.reverse();
                (c, w)
            })
            .collect();
        (word(&[Letter::f(i, a), Letter::e(i, b)]), mirrored)
    }
}

/// Straightening of `E_i^{(b)} F_i^{(a)}` on the single weight space `λ`.
pub fn verify_ef_straightening(m: &WeightModule, i: usize, a: u32, b: u32, weight: &Content) -> Result<VerificationReport, TensorError> {
    m.check_index(i)?;
    m.check_weight(weight)?;
    let p = params(m)
        .with_i(i)
        .with("a", a as i64)
        .with("b", b as i64)
        .with("pairing", weight.pairing(i));
    let mut run = CheckRun::start("ef_straightening", "cor-4.3", p);
    let (lhs, rhs) = straightening(i, a, b, weight);
    match compare_at(m, &lhs, &rhs, weight)? {
        Some(cx) => run.fail_case(cx),
        None => run.record_case(),
    }
    Ok(run.finish())
}

/// Straightening of `E_i^{(b)} F_i^{(a)}` on every weight space.
pub fn verify_ef_straightening_all(m: &WeightModule, i: usize, a: u32, b: u32) -> Result<VerificationReport, TensorError> {
    m.check_index(i)?;
    let p = params(m).with_i(i).with("a", a as i64).with("b", b as i64);
    sweep(m, "ef_straightening", "cor-4.3", p, |w| vec![straightening(i, a, b, w)])
}

fn commutation(x: Letter, y: Letter) -> (Combination, Combination) {
    (word(&[x, y]), word(&[y, x]))
}

/// For adjacent `i, j`: `E_i E_j E_i = E_i^{(2)} E_j + E_j E_i^{(2)}`, and the
/// same for `F`. For non-adjacent `i, j` the generators commute instead.
pub fn verify_serre(m: &WeightModule, i: usize, j: usize) -> Result<VerificationReport, TensorError> {
    m.check_index(i)?;
    m.check_index(j)?;
    if i == j {
        return Err(TensorError::Precondition(format!("Serre relation needs i != j, got {i}")));
    }
    let adjacent = m.cartan().adjacent(i, j);
    let p = params(m).with_i(i).with_j(j);
    let check = if adjacent { "serre" } else { "serre_distant" };
    sweep(m, check, "cond-viii", p, |_| {
        [LetterKind::E, LetterKind::F]
            .into_iter()
            .map(|kind| {
                let l = |index, power| Letter { kind, index, power };
                if adjacent {
                    (
                        word(&[l(i, 1), l(j, 1), l(i, 1)]),
                        vec![
                            (LaurentPoly::one(), vec![l(i, 2), l(j, 1)]),
                            (LaurentPoly::one(), vec![l(j, 1), l(i, 2)]),
                        ],
                    )
                } else {
                    commutation(l(i, 1), l(j, 1))
                }
            })
            .collect()
    })
}

/// For adjacent `i, j` and `a + b >= 1`:
///
/// ```text
/// X_i^{(a)} X_j X_i^{(b)} = [a+b-1 choose b] X_i^{(a+b)} X_j + [a+b-1 choose a] X_j X_i^{(a+b)}
/// ```
///
/// for `X = E` and `X = F`.
pub fn verify_mixed_decompositions(m: &WeightModule, i: usize, j: usize, a: u32, b: u32) -> Result<VerificationReport, TensorError> {
    m.check_index(i)?;
    m.check_index(j)?;
    if !m.cartan().adjacent(i, j) {
        return Err(TensorError::Precondition(format!("vertices {i} and {j} are not adjacent")));
    }
    if a + b == 0 {
        return Err(TensorError::Precondition("need a + b >= 1".to_string()));
    }
    let s = (a + b) as i64;
    let (left, right) = (qbinom(s - 1, b as i64), qbinom(s - 1, a as i64));
    let p = params(m).with_i(i).with_j(j).with("a", a as i64).with("b", b as i64);
    sweep(m, "mixed_decomposition", "cor-4.8", p, |_| {
        [LetterKind::E, LetterKind::F]
            .into_iter()
            .map(|kind| {
                let l = |index, power| Letter { kind, index, power };
                let lhs: Vec<Letter> = [l(i, a), l(j, 1), l(i, b)].into_iter().filter(|x| x.power > 0).collect();
                let rhs = [(left.clone(), vec![l(i, a + b), l(j, 1)]), (right.clone(), vec![l(j, 1), l(i, a + b)])]
                    .into_iter()
                    .filter(|(c, _)| !c.is_zero())
                    .collect();
                (word(&lhs), rhs)
            })
            .collect()
    })
}

/// `F_j E_i = E_i F_j` and `F_i E_j = E_j F_i` for `i != j`; when `i, j` are
/// not adjacent also `E_i E_j = E_j E_i` and `F_i F_j = F_j F_i`.
pub fn verify_distant_and_ef_commutations(m: &WeightModule, i: usize, j: usize) -> Result<VerificationReport, TensorError> {
    m.check_index(i)?;
    m.check_index(j)?;
    if i == j {
        return Err(TensorError::Precondition(format!("commutation check needs i != j, got {i}")));
    }
    let adjacent = m.cartan().adjacent(i, j);
    let p = params(m).with_i(i).with_j(j);
    sweep(m, "distant_ef_commutation", "cond-ix", p, |_| {
        let mut ids = vec![
            commutation(Letter::f(j, 1), Letter::e(i, 1)),
            commutation(Letter::f(i, 1), Letter::e(j, 1)),
        ];
        if !adjacent {
            ids.push(commutation(Letter::e(i, 1), Letter::e(j, 1)));
            ids.push(commutation(Letter::f(i, 1), Letter::f(j, 1)));
        }
        ids
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::qint;
    use crate::tensor_rep::build_module;

    fn c(v: &[i64]) -> Content {
        Content(v.to_vec())
    }

    #[test]
    fn divided_power_rule_small() {
        let m = build_module(2, 3).unwrap();
        assert!(verify_divided_power_rule(&m, 1, 1, 1).unwrap().passed());
        assert!(verify_divided_power_rule(&m, 1, 0, 2).unwrap().passed());
        let m = build_module(3, 4).unwrap();
        let r = verify_divided_power_rule(&m, 2, 1, 1).unwrap();
        assert!(r.passed());
        assert_eq!(r.cases, m.weights().len());
    }

    #[test]
    fn commutator_is_quantum_integer() {
        // e f - f e = [<λ, α_i>] on each weight space
        let m = build_module(3, 3).unwrap();
        for w in m.weights() {
            for i in 1..=2 {
                let ef = m.word_matrix(&[Letter::e(i, 1), Letter::f(i, 1)], w).unwrap();
                let fe = m.word_matrix(&[Letter::f(i, 1), Letter::e(i, 1)], w).unwrap();
                let expected = m.identity(w).scale(&qint(w.pairing(i)));
                assert_eq!(ef.sub(&fe).unwrap(), expected, "weight {w}, i={i}");
            }
        }
    }

    #[test]
    fn straightening_examples() {
        let m = build_module(2, 2).unwrap();
        assert!(verify_ef_straightening(&m, 1, 1, 1, &c(&[1, 1])).unwrap().passed());
        let r = verify_ef_straightening(&m, 1, 1, 1, &c(&[2, 0])).unwrap();
        assert!(r.passed());
        assert_eq!(r.params.extra["pairing"], -2);
        for (a, b) in [(1, 0), (0, 1), (2, 1), (1, 2), (2, 2)] {
            assert!(verify_ef_straightening_all(&m, 1, a, b).unwrap().passed(), "a={a} b={b}");
        }
    }

    #[test]
    fn straightening_detects_wrong_coefficient() {
        let m = build_module(2, 2).unwrap();
        let w = c(&[1, 1]);
        let (lhs, mut rhs) = straightening(1, 1, 1, &w);
        rhs[0].0 = &rhs[0].0 + &LaurentPoly::one();
        assert!(compare_at(&m, &lhs, &rhs, &w).unwrap().is_some());
    }

    #[test]
    fn serre_and_mixed() {
        let m = build_module(3, 2).unwrap();
        assert!(verify_serre(&m, 1, 2).unwrap().passed());
        assert!(verify_serre(&m, 2, 1).unwrap().passed());
        let m = build_module(3, 3).unwrap();
        assert!(verify_serre(&m, 1, 2).unwrap().passed());
        let m = build_module(4, 2).unwrap();
        let r = verify_serre(&m, 1, 3).unwrap();
        assert!(r.passed());
        assert_eq!(r.check, "serre_distant");
        let m = build_module(3, 4).unwrap();
        for (a, b) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3)] {
            assert!(verify_mixed_decompositions(&m, 1, 2, a, b).unwrap().passed(), "a={a} b={b}");
            assert!(verify_mixed_decompositions(&m, 2, 1, a, b).unwrap().passed(), "a={a} b={b}");
        }
    }

    #[test]
    fn commutations() {
        let m = build_module(3, 2).unwrap();
        assert!(verify_distant_and_ef_commutations(&m, 1, 2).unwrap().passed());
        let m = build_module(4, 2).unwrap();
        assert!(verify_distant_and_ef_commutations(&m, 1, 3).unwrap().passed());
        assert!(matches!(
            verify_distant_and_ef_commutations(&m, 2, 2),
            Err(TensorError::Precondition(_))
        ));
        assert!(matches!(
            verify_mixed_decompositions(&m, 1, 3, 1, 1),
            Err(TensorError::Precondition(_))
        ));
    }
}
