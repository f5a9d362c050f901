//! Plain-text form of expressions.
//!
//! A term is a whitespace separated list: a Gaussian-rational coefficient,
//! an optional power of π, then factors — atoms such as `NJ(h0,a1,a2)`,
//! generators `b0 bp0 z0 zb0 zp0 zbp0`, and exterior letters `C0 A0 I`.
//! Terms are joined by ` + `.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::coefficient::{fmt_gauss, parse_gauss, Coefficient};

use super::canon::Expr;
use super::term::{Atom, Gen, GenKind, Head, Label, Letter, Monomial, Slot, SlotType};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("bad token `{0}`")]
    Token(String),
    #[error("bad coefficient `{0}`")]
    Coefficient(String),
    #[error("wrong arity in `{0}`")]
    Arity(String),
}

fn fmt_slot(s: &Slot) -> String {
    match s.ty {
        SlotType::Hol => format!("h{}", s.label),
        SlotType::Anti => format!("a{}", s.label),
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.slots.is_empty() {
            return write!(f, "{}", self.head.name());
        }
        let inner: Vec<String> = self.slots.iter().map(fmt_slot).collect();
        write!(f, "{}({})", self.head.name(), inner.join(","))
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.label)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::C(l) => write!(f, "C{l}"),
            Letter::A(l) => write!(f, "A{l}"),
            Letter::I => write!(f, "I"),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.atoms.iter().map(ToString::to_string).collect();
        parts.extend(self.gens.iter().map(ToString::to_string));
        parts.extend(self.ext.iter().map(ToString::to_string));
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Text of one term with a single power of π.
pub fn fmt_term(c: &crate::coefficient::GaussRat, pi: i32, m: &Monomial) -> String {
    let mut s = fmt_gauss(c);
    match pi {
        0 => {}
        1 => s.push_str(" pi"),
        k => s.push_str(&format!(" pi^{k}")),
    }
    let body = m.to_string();
    if body != "1" {
        s.push(' ');
        s.push_str(&body);
    }
    s
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .iter()
            .flat_map(|(m, c)| c.terms().map(|(k, v)| fmt_term(v, k, m)).collect::<Vec<_>>())
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr[{self}]")
    }
}

/// Raw terms parsed from text together with the set of labels whose slots
/// were written with the wildcard type `s` (stored as `Hol`).
pub struct ParsedTerms {
    pub terms: Vec<(Coefficient, Monomial)>,
    pub wildcards: BTreeSet<Label>,
}

fn parse_label(s: &str, tok: &str) -> Result<Label, ParseError> {
    s.parse().map_err(|_| ParseError::Token(tok.into()))
}

fn parse_gen(tok: &str) -> Option<Gen> {
    const KINDS: [(&str, GenKind); 6] = [
        ("zbp", GenKind::ZBarPrime),
        ("zp", GenKind::ZPrime),
        ("zb", GenKind::ZBar),
        ("bp", GenKind::BPlus),
        ("b", GenKind::B),
        ("z", GenKind::Z),
    ];
    for (p, k) in KINDS {
        if let Some(rest) = tok.strip_prefix(p) {
            if let Ok(l) = rest.parse() {
                return Some(Gen { kind: k, label: l });
            }
        }
    }
    None
}

fn parse_term(
    text: &str,
    wildcards: &mut BTreeSet<Label>,
    allow_wildcards: bool,
) -> Result<(Coefficient, Monomial), ParseError> {
    let mut coeff = Coefficient::one();
    let mut m = Monomial::one();
    for (i, tok) in text.split_whitespace().enumerate() {
        if i == 0 {
            if let Some(g) = parse_gauss(tok) {
                coeff = Coefficient::monomial(g, 0);
                continue;
            }
        }
        if tok == "pi" {
            coeff = coeff.shift_pi(1);
        } else if let Some(k) = tok.strip_prefix("pi^") {
            let k: i32 = k.parse().map_err(|_| ParseError::Coefficient(tok.into()))?;
            coeff = coeff.shift_pi(k);
        } else if tok == "I" {
            m.ext.push(Letter::I);
        } else if let Some(l) = tok.strip_prefix('C').and_then(|r| r.parse().ok()) {
            m.ext.push(Letter::C(l));
        } else if let Some(l) = tok.strip_prefix('A').and_then(|r| r.parse().ok()) {
            m.ext.push(Letter::A(l));
        } else if let Some(g) = parse_gen(tok) {
            m.gens.push(g);
        } else {
            let (name, args) = match tok.split_once('(') {
                Some((n, rest)) => {
                    let rest = rest.strip_suffix(')').ok_or_else(|| ParseError::Token(tok.into()))?;
                    (n, rest.split(',').filter(|s| !s.is_empty()).collect::<Vec<_>>())
                }
                None => (tok, vec![]),
            };
            let head = Head::from_name(name).ok_or_else(|| ParseError::Token(tok.into()))?;
            let mut slots = Vec::new();
            for arg in args {
                let (ty, rest) = arg.split_at(1);
                let label = parse_label(rest, tok)?;
                let ty = match ty {
                    "h" => SlotType::Hol,
                    "a" => SlotType::Anti,
                    "s" if allow_wildcards => {
                        wildcards.insert(label);
                        SlotType::Hol
                    }
                    _ => return Err(ParseError::Token(tok.into())),
                };
                slots.push(Slot { ty, label });
            }
            if slots.len() != head.arity() {
                return Err(ParseError::Arity(tok.into()));
            }
            m.atoms.push(Atom { head, slots });
        }
    }
    Ok((coeff, m))
}

/// Parses ` + `-separated terms without normalizing them.
pub fn parse_terms(text: &str, allow_wildcards: bool) -> Result<ParsedTerms, ParseError> {
    let mut wildcards = BTreeSet::new();
    let text = text.trim();
    if text == "0" {
        return Ok(ParsedTerms { terms: vec![], wildcards });
    }
    let terms = text
        .split(" + ")
        .map(|t| parse_term(t, &mut wildcards, allow_wildcards))
        .collect::<Result<_, _>>()?;
    Ok(ParsedTerms { terms, wildcards })
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Expr::collect(parse_terms(s, false)?.terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_parse_round_trip() {
        let src = "-1/3 pi^-1 NJ(h0,h1,h2) NJ(a0,a1,a2) I + 2i RE(a0,a1) C0 C1 I + (1/2-1/3i) pi b0 zbp1 C0 I";
        let e: Expr = src.parse().unwrap();
        let again: Expr = e.to_string().parse().unwrap();
        assert_eq!(e, again);
        assert_eq!(e.len(), 3);
    }

    #[test]
    fn rejects_garbage() {
        assert!("1 FOO(h0)".parse::<Expr>().is_err());
        assert!("1 NJ(h0,h1)".parse::<Expr>().is_err());
    }
}
