//! Text syntax for formal sums:
//!
//! ```text
//! sum    := term (('+' | '-') term)* ('@' anchor)?
//! term   := (coeff '*')? word
//! coeff  := '(' laurent ')' | laurent-without-spaces
//! word   := 'id' | letter+
//! letter := ('E' | 'F') index ('^(' power ')')?
//! anchor := '(' c1, ..., cn ')'      content vector
//!         | '<' p1, ..., pr '>'      pairings with the simple roots
//! ```
//!
//! Tokens are numbered from 1 in error messages.

use std::sync::Arc;

use super::{FormalSum, FormalWord, RewriteError};
use crate::cartan::{CartanData, Content, Weight};
use crate::qalg::LaurentPoly;
use crate::tensor_rep::Letter;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Text(String),
    Group(String),
    Plus,
    Minus,
    Star,
    Anchor(String),
}

fn tokenize(text: &str) -> Result<Vec<Token>, RewriteError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let ch = chars[k];
        if ch.is_whitespace() {
            k += 1;
            continue;
        }
        let position = tokens.len() + 1;
        match ch {
            '+' => {
                tokens.push(Token::Plus);
                k += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                k += 1;
            }
            '-' if chars.get(k + 1).is_none_or(|c| c.is_whitespace()) => {
                tokens.push(Token::Minus);
                k += 1;
            }
            '@' => {
                tokens.push(Token::Anchor(chars[k + 1..].iter().collect::<String>().trim().to_string()));
                k = chars.len();
            }
            '(' => {
                let close = chars[k..].iter().position(|&c| c == ')').ok_or_else(|| RewriteError::Syntax {
                    token: position,
                    reason: "unclosed '('".into(),
                })?;
                tokens.push(Token::Group(chars[k + 1..k + close].iter().collect()));
                k += close + 1;
            }
            _ => {
                let start = k;
                while k < chars.len() && !chars[k].is_whitespace() && !matches!(chars[k], '+' | '*' | '@') {
                    if chars[k] == '^' && chars.get(k + 1) == Some(&'(') {
                        match chars[k..].iter().position(|&c| c == ')') {
                            Some(close) => k += close + 1,
                            None => {
                                return Err(RewriteError::Syntax {
                                    token: position,
                                    reason: "unclosed '^('".into(),
                                })
                            }
                        }
                    } else {
                        k += 1;
                    }
                }
                tokens.push(Token::Text(chars[start..k].iter().collect()));
            }
        }
    }
    Ok(tokens)
}

/// `E3`, `F1^(2)`.
pub fn parse_letter(text: &str) -> Option<Letter> {
    let mut chars = text.chars();
    let kind = chars.next()?;
    let rest: &str = chars.as_str();
    let (index, power) = match rest.split_once("^(") {
        Some((index, power)) => (index, power.strip_suffix(')')?),
        None => (rest, "1"),
    };
    if index.is_empty() || !index.chars().all(|c| c.is_ascii_digit()) || !power.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let index: usize = index.parse().ok()?;
    let power: u32 = power.parse().ok()?;
    if power == 0 {
        return None;
    }
    match kind {
        'E' => Some(Letter::e(index, power)),
        'F' => Some(Letter::f(index, power)),
        _ => None,
    }
}

/// `(2,0,1)` as a content vector or `<1,-1>` as pairings.
pub fn parse_anchor(text: &str, cartan: &CartanData) -> Result<Weight, String> {
    let text = text.trim();
    let weight = if let Some(inner) = text.strip_prefix('<') {
        let inner = inner.strip_suffix('>').ok_or("unclosed '<'")?;
        let pairings: Result<Vec<i64>, _> = inner.split(',').map(|t| t.trim().parse::<i64>()).collect();
        Weight::from_pairings(pairings.map_err(|e| format!("bad pairing list {text:?}: {e}"))?)
    } else {
        let content: Content = text.parse()?;
        if content.n() != cartan.rank() + 1 {
            return Err(format!(
                "content {content} has {} entries, expected {} for rank {}",
                content.n(),
                cartan.rank() + 1,
                cartan.rank()
            ));
        }
        Weight::from_content(content)
    };
    cartan.check_weight(&weight).map_err(|e| e.to_string())?;
    Ok(weight)
}

fn token_text(t: &Token) -> String {
    match t {
        Token::Text(s) => s.clone(),
        Token::Group(s) => format!("({s})"),
        Token::Plus => "+".into(),
        Token::Minus => "-".into(),
        Token::Star => "*".into(),
        Token::Anchor(s) => format!("@ {s}"),
    }
}

/// Parses a formal sum. The anchor is taken from the text when present,
/// otherwise from `anchor`; one of the two is required.
pub fn parse_sum(text: &str, cartan: Arc<CartanData>, anchor: Option<&Weight>) -> Result<FormalSum, RewriteError> {
    let tokens = tokenize(text)?;
    let mut source = anchor.cloned();
    let mut body: Vec<(usize, &Token)> = Vec::new();
    for (k, t) in tokens.iter().enumerate() {
        if let Token::Anchor(a) = t {
            if k + 1 != tokens.len() {
                return Err(RewriteError::Syntax {
                    token: k + 1,
                    reason: "anchor must come last".into(),
                });
            }
            let parsed = parse_anchor(a, &cartan).map_err(|reason| RewriteError::Syntax { token: k + 1, reason })?;
            if let Some(given) = &source {
                if given.pairings() != parsed.pairings() {
                    return Err(RewriteError::Syntax {
                        token: k + 1,
                        reason: format!("anchor {parsed} disagrees with the requested weight {given}"),
                    });
                }
            }
            source = Some(parsed);
        } else {
            body.push((k + 1, t));
        }
    }
    let source = source.ok_or_else(|| RewriteError::Syntax {
        token: tokens.len() + 1,
        reason: "missing weight anchor '@ (...)'".into(),
    })?;
    let mut sum = FormalSum::zero(cartan, source);
    for (coeff, word) in terms_of(&tokens, body)? {
        sum.add_term(word, coeff)?;
    }
    Ok(sum)
}

/// Parses the terms of a sum without checking weights. An anchor, if any,
/// is skipped.
pub fn parse_terms(text: &str) -> Result<Vec<(LaurentPoly, FormalWord)>, RewriteError> {
    let tokens = tokenize(text)?;
    let body = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| !matches!(t, Token::Anchor(_)))
        .map(|(k, t)| (k + 1, t))
        .collect();
    terms_of(&tokens, body)
}

fn terms_of(tokens: &[Token], body: Vec<(usize, &Token)>) -> Result<Vec<(LaurentPoly, FormalWord)>, RewriteError> {
    let mut out = Vec::new();
    if body.is_empty() {
        return Err(RewriteError::Syntax {
            token: 1,
            reason: "empty expression".into(),
        });
    }
    if body.len() == 1 && matches!(body[0].1, Token::Text(t) if t == "0") {
        return Ok(out);
    }
    // split into signed terms
    let mut terms: Vec<(bool, Vec<(usize, &Token)>)> = vec![(false, Vec::new())];
    for (pos, t) in body {
        match t {
            Token::Plus | Token::Minus => {
                let negative = matches!(t, Token::Minus);
                if terms.last().is_some_and(|(_, toks)| toks.is_empty()) {
                    if terms.len() == 1 && negative {
                        terms.last_mut().expect("nonempty").0 = true;
                        continue;
                    }
                    return Err(RewriteError::Syntax {
                        token: pos,
                        reason: "missing term before sign".into(),
                    });
                }
                terms.push((negative, Vec::new()));
            }
            _ => terms.last_mut().expect("nonempty").1.push((pos, t)),
        }
    }
    for (negative, toks) in terms {
        let Some(&(last_pos, _)) = toks.last() else {
            return Err(RewriteError::Syntax {
                token: tokens.len() + 1,
                reason: "expression ends with a sign".into(),
            });
        };
        let star = toks.iter().rposition(|(_, t)| matches!(t, Token::Star));
        let (coeff_toks, word_toks) = match star {
            Some(s) => (&toks[..s], &toks[s + 1..]),
            None => (&toks[..0], &toks[..]),
        };
        let mut coeff = if coeff_toks.is_empty() {
            if star.is_some() {
                return Err(RewriteError::Syntax {
                    token: toks[0].0,
                    reason: "'*' without a coefficient".into(),
                });
            }
            LaurentPoly::one()
        } else if let [(pos, Token::Group(inner))] = coeff_toks {
            inner.parse().map_err(|e| RewriteError::Syntax {
                token: *pos,
                reason: format!("bad coefficient: {e}"),
            })?
        } else {
            let text: String = coeff_toks.iter().map(|(_, t)| token_text(t)).collect();
            text.parse().map_err(|e| RewriteError::Syntax {
                token: coeff_toks[0].0,
                reason: format!("bad coefficient {text:?}: {e}"),
            })?
        };
        if negative {
            coeff = -coeff;
        }
        if word_toks.is_empty() {
            return Err(RewriteError::Syntax {
                token: last_pos + 1,
                reason: "expected a word".into(),
            });
        }
        let mut letters = Vec::new();
        for (k, (pos, t)) in word_toks.iter().enumerate() {
            match t {
                Token::Text(w) if w == "id" && word_toks.len() == 1 => {}
                Token::Text(w) if w == "id" && k > 0 => {
                    return Err(RewriteError::Syntax {
                        token: *pos,
                        reason: "'id' must stand alone".into(),
                    })
                }
                Token::Text(w) => {
                    let letter = parse_letter(w).ok_or_else(|| RewriteError::Syntax {
                        token: *pos,
                        reason: format!("expected a letter like E1 or F2^(3), found {w:?}"),
                    })?;
                    letters.push(letter);
                }
                other => {
                    return Err(RewriteError::Syntax {
                        token: *pos,
                        reason: format!("unexpected {:?}", token_text(other)),
                    })
                }
            }
        }
        out.push((coeff, FormalWord::new(letters)));
    }
    Ok(out)
}
