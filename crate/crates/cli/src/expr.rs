//! Divisor expressions such as `3L - E` or `1/2 O + F`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := ['-'] [coeff ['*' | '·']] label
//! coeff := integer | integer '/' integer
//! ```

use std::fmt;

use nok_core::exactmath::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at column {column}")]
pub struct ExprError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DivisorExpr {
    pub terms: Vec<(Rational, String)>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Slash,
    Times,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            _ if c.is_whitespace() => i += 1,
            '+' | '-' | '−' | '/' | '*' | '·' => {
                out.push((
                    col,
                    match c {
                        '+' => Tok::Plus,
                        '/' => Tok::Slash,
                        '*' | '·' => Tok::Times,
                        _ => Tok::Minus,
                    },
                ));
                i += 1;
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push((col, Tok::Num(digits.parse().expect("ascii digits"))));
            }
            _ if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((col, Tok::Ident(chars[start..i].iter().collect())));
            }
            _ => {
                return Err(ExprError {
                    column: col,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

impl DivisorExpr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let toks = lex(src)?;
        let end = src.chars().count() + 1;
        if toks.is_empty() {
            return Err(ExprError {
                column: 1,
                message: "empty expression".into(),
            });
        }
        let mut pos = 0;
        let mut terms = Vec::new();
        let err = |col: usize, msg: &str| ExprError {
            column: col,
            message: msg.to_string(),
        };
        let col_at = |p: usize| toks.get(p).map_or(end, |(c, _)| *c);
        loop {
            // sign: leading '-' on the first term, then the joining operator
            let mut negative = false;
            if terms.is_empty() {
                if let Some((_, Tok::Minus)) = toks.get(pos) {
                    negative = true;
                    pos += 1;
                }
            } else {
                match toks.get(pos) {
                    Some((_, Tok::Plus)) => pos += 1,
                    Some((_, Tok::Minus)) => {
                        negative = true;
                        pos += 1;
                    }
                    None => break,
                    Some((c, _)) => return Err(err(*c, "expected `+` or `-`")),
                }
            }
            let mut coeff = Rational::one();
            if let Some((_, Tok::Num(n))) = toks.get(pos) {
                coeff = Rational::from_integer(n.clone());
                pos += 1;
                if let Some((_, Tok::Slash)) = toks.get(pos) {
                    pos += 1;
                    match toks.get(pos) {
                        Some((c, Tok::Num(d))) => {
                            if d.is_zero() {
                                return Err(err(*c, "zero denominator"));
                            }
                            coeff = Rational::new(n.clone(), d.clone());
                            pos += 1;
                        }
                        _ => return Err(err(col_at(pos), "expected a denominator")),
                    }
                }
                if let Some((_, Tok::Times)) = toks.get(pos) {
                    pos += 1;
                }
            }
            match toks.get(pos) {
                Some((_, Tok::Ident(name))) => {
                    if negative {
                        coeff = -coeff;
                    }
                    terms.push((coeff, name.clone()));
                    pos += 1;
                }
                _ => return Err(err(col_at(pos), "expected a label")),
            }
        }
        Ok(DivisorExpr { terms })
    }

    /// Label positions in the source, for diagnostics on unknown labels.
    pub fn label_column(src: &str, label: &str) -> usize {
        lex(src)
            .ok()
            .and_then(|t| t.into_iter().find(|(_, tok)| *tok == Tok::Ident(label.to_string())))
            .map_or(1, |(c, _)| c)
    }
}

/// Writes `Σ cᵢ·labelᵢ` as `3·L - E`, `1/2·O + F`; an empty sum is `0`.
pub fn format_terms<'a>(terms: impl IntoIterator<Item = (&'a Rational, &'a str)>) -> String {
    let mut out = String::new();
    for (k, (c, label)) in terms.into_iter().enumerate() {
        let magnitude = c.abs();
        if k == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        if !magnitude.is_one() {
            out.push_str(&format!("{magnitude}·"));
        }
        out.push_str(label);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for DivisorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(self.terms.iter().map(|(c, l)| (c, l.as_str()))))
    }
}
