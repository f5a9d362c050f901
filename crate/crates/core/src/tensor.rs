//! Curvature-tensor identities as data-driven rewrite rules.
//!
//! Each rule rewrites a single atom pattern (slot types `h`, `a`, or the
//! wildcard `s`) into a linear combination of atom products. Patterns match
//! up to the slot symmetries of the head, picking up the symmetry sign.
//! Labels in the right-hand side that do not occur in the pattern are fresh
//! dummies.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::adjoint_term;
use crate::coefficient::Coefficient;
use crate::symbolic::text::{parse_terms, ParseError};
use crate::symbolic::{Atom, Expr, Label, Monomial, SlotType};

/// The bundled identity file.
pub const DEFAULT_RULES: &str = include_str!("../data/identities.rules");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule file line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("rule `{name}`: {msg}")]
    BadRule { name: String, msg: String },
    #[error("rule `{name}`: {source}")]
    Parse { name: String, source: ParseError },
    #[error("rewriting did not terminate within {0} steps")]
    NonTerminating(usize),
    #[error("cannot read rule file: {0}")]
    Io(String),
}

/// One record of the rule file, with the texts kept verbatim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleRecord {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub source: String,
    pub formula: String,
}

/// A compiled rewrite rule.
#[derive(Clone, Debug)]
pub struct Rule {
    pub record: RuleRecord,
    pub pattern: Atom,
    pub wildcards: BTreeSet<Label>,
    pub rhs: Vec<(Coefficient, Monomial)>,
}

#[derive(Clone, Debug)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
}

const FIELDS: [&str; 5] = ["name", "lhs", "rhs", "source", "formula"];

impl RuleRecord {
    fn compile(&self) -> Result<Rule, RuleError> {
        let err = |source| RuleError::Parse { name: self.name.clone(), source };
        let lhs = parse_terms(&self.lhs, true).map_err(err)?;
        let bad = |msg: &str| RuleError::BadRule { name: self.name.clone(), msg: msg.into() };
        let [(c, m)] = lhs.terms.as_slice() else {
            return Err(bad("left-hand side must be a single atom"));
        };
        if *c != Coefficient::one() || m.atoms.len() != 1 || !m.gens.is_empty() || !m.ext.is_empty() {
            return Err(bad("left-hand side must be a single atom with unit coefficient"));
        }
        let labels = m.labels();
        let distinct: BTreeSet<_> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(bad("pattern labels must be distinct"));
        }
        let rhs = parse_terms(&self.rhs, true).map_err(err)?;
        let extra: BTreeSet<Label> = rhs.wildcards.difference(&lhs.wildcards).copied().collect();
        if !extra.is_empty() {
            return Err(bad("wildcard slot in the right-hand side does not occur on the left"));
        }
        Ok(Rule {
            record: self.clone(),
            pattern: m.atoms[0].clone(),
            wildcards: lhs.wildcards,
            rhs: rhs.terms,
        })
    }
}

impl RuleSet {
    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let records = parse_records(text)?;
        let rules = records.iter().map(RuleRecord::compile).collect::<Result<_, _>>()?;
        Ok(Self { rules })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, RuleError> {
        let text = std::fs::read_to_string(path).map_err(|e| RuleError::Io(e.to_string()))?;
        Self::parse(&text)
    }

    pub fn bundled() -> Self {
        Self::parse(DEFAULT_RULES).expect("bundled rule file is valid")
    }

    pub fn records(&self) -> Vec<RuleRecord> {
        self.rules.iter().map(|r| r.record.clone()).collect()
    }

    /// Serialized form; `RuleSet::parse(text).serialize() == text` for files in
    /// this layout.
    pub fn serialize(&self) -> String {
        serialize_records(&self.records())
    }

    /// SHA-256 of the serialized rules, as lowercase hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.serialize().as_bytes());
        digest.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn subset(&self, names: &[&str]) -> Self {
        Self {
            rules: self
                .rules
                .iter()
                .filter(|r| names.iter().any(|n| r.record.name.starts_with(n)))
                .cloned()
                .collect(),
        }
    }
}

pub fn parse_records(text: &str) -> Result<Vec<RuleRecord>, RuleError> {
    let mut out = Vec::new();
    let mut current: Option<Vec<(String, String)>> = None;
    let finish = |fields: Vec<(String, String)>, line: usize| -> Result<RuleRecord, RuleError> {
        let names: Vec<&str> = fields.iter().map(|(k, _)| k.as_str()).collect();
        if names != FIELDS {
            return Err(RuleError::Syntax {
                line,
                msg: format!("expected fields {FIELDS:?} in order, got {names:?}"),
            });
        }
        let v = |i: usize| fields[i].1.clone();
        Ok(RuleRecord { name: v(0), lhs: v(1), rhs: v(2), source: v(3), formula: v(4) })
    };
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line == "[rule]" {
            if let Some(f) = current.take() {
                out.push(finish(f, lineno)?);
            }
            current = Some(Vec::new());
        } else if line.is_empty() {
            continue;
        } else if let Some((k, v)) = line.split_once(" = ") {
            let Some(f) = current.as_mut() else {
                return Err(RuleError::Syntax { line: lineno, msg: "field outside a record".into() });
            };
            f.push((k.to_string(), v.to_string()));
        } else {
            return Err(RuleError::Syntax { line: lineno, msg: format!("cannot parse `{line}`") });
        }
    }
    if let Some(f) = current.take() {
        out.push(finish(f, text.lines().count())?);
    }
    Ok(out)
}

pub fn serialize_records(records: &[RuleRecord]) -> String {
    let blocks: Vec<String> = records
        .iter()
        .map(|r| {
            format!(
                "[rule]\nname = {}\nlhs = {}\nrhs = {}\nsource = {}\nformula = {}\n",
                r.name, r.lhs, r.rhs, r.source, r.formula
            )
        })
        .collect();
    blocks.join("\n")
}

impl Rule {
    /// Rewrites `atom` if it matches; returns the replacement raw terms
    /// (atom products) with the fresh-label offset `fresh`.
    pub(crate) fn rewrite(&self, atom: &Atom, fresh: Label) -> Option<Vec<(Coefficient, Vec<Atom>)>> {
        if atom.head != self.pattern.head {
            return None;
        }
        for (perm, sign) in atom.head.symmetries() {
            let slots: Vec<_> = perm.iter().map(|&p| atom.slots[p]).collect();
            let ok = self.pattern.slots.iter().zip(&slots).all(|(p, s)| {
                self.wildcards.contains(&p.label) || p.ty == s.ty
            });
            if !ok {
                continue;
            }
            let bind = |l: Label| -> Option<(SlotType, Label)> {
                self.pattern
                    .slots
                    .iter()
                    .position(|p| p.label == l)
                    .map(|i| (slots[i].ty, slots[i].label))
            };
            let out = self
                .rhs
                .iter()
                .map(|(c, m)| {
                    let atoms = m
                        .atoms
                        .iter()
                        .map(|at| {
                            let mut at = at.clone();
                            for s in &mut at.slots {
                                match bind(s.label) {
                                    Some((ty, l)) => {
                                        if self.wildcards.contains(&s.label) {
                                            s.ty = ty;
                                        }
                                        s.label = l;
                                    }
                                    None => s.label += fresh,
                                }
                            }
                            at
                        })
                        .collect();
                    let c = if *sign < 0 { -c.clone() } else { c.clone() };
                    (c, atoms)
                })
                .collect();
            return Some(out);
        }
        None
    }
}

const STEP_BUDGET: usize = 10_000;

/// Rewrites with the rules (first matching rule in file order) until no
/// rule applies.
pub fn apply_identities(e: &Expr, ruleset: &RuleSet) -> Result<Expr, RuleError> {
    let mut current = e.clone();
    for _ in 0..STEP_BUDGET {
        let mut changed = false;
        let mut raw = Vec::new();
        for (m, c) in current.iter() {
            let fresh = m.max_label().map_or(0, |x| x + 1);
            let hit = m.atoms.iter().enumerate().find_map(|(i, at)| {
                ruleset.rules.iter().find_map(|r| r.rewrite(at, fresh)).map(|rep| (i, rep))
            });
            match hit {
                None => raw.push((c.clone(), m.clone())),
                Some((i, rep)) => {
                    changed = true;
                    for (rc, atoms) in rep {
                        let mut mm = m.clone();
                        mm.atoms.remove(i);
                        mm.atoms.splice(i..i, atoms);
                        raw.push((c * &rc, mm));
                    }
                }
            }
        }
        if !changed {
            return Ok(current);
        }
        current = Expr::collect(raw);
    }
    Err(RuleError::NonTerminating(STEP_BUDGET))
}

/// Unique normal form of an expression (idempotent, linear).
pub fn canonicalize(e: &Expr) -> Expr {
    Expr::collect(e.raw())
}

/// Complex conjugation: slot types swap, coefficients conjugate, exterior
/// words go to their adjoints.
pub fn conjugate(e: &Expr) -> Expr {
    e.map_terms(|c, m| vec![adjoint_term(c, m)])
}

/// Equality after rewriting both sides with `ruleset`.
pub fn equal_modulo(a: &Expr, b: &Expr, ruleset: &RuleSet) -> Result<bool, RuleError> {
    Ok(apply_identities(a, ruleset)? == apply_identities(b, ruleset)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(s: &str) -> Expr {
        s.parse().unwrap()
    }

    #[test]
    fn bundled_file_round_trips_bit_exactly() {
        let rs = RuleSet::bundled();
        assert_eq!(rs.serialize(), DEFAULT_RULES);
        assert_eq!(rs.hash().len(), 64);
    }

    #[test]
    fn riemann_antisymmetry_cancels() {
        let e = ex("1 RTX(h0,a1,h2,a3) C0 C2 I A1 A3 + 1 RTX(a1,h0,h2,a3) C0 C2 I A1 A3");
        assert!(canonicalize(&e).is_zero());
    }

    #[test]
    fn mixed_nnj_becomes_nj_product() {
        let rs = RuleSet::bundled();
        let e = ex("2i NNJ(h0,a1,h2,a3) C1 I A0 A2 A3");
        let r = apply_identities(&e, &rs).unwrap();
        assert_eq!(r, ex("2 NJ(h0,h2,h4) NJ(a1,a3,a4) C1 I A0 A2 A3"));
        // the antisymmetric twin picks up a sign through the slot symmetry
        let e2 = ex("2i NNJ(h0,a1,a3,h2) C1 I A0 A2 A3");
        assert_eq!(apply_identities(&e2, &rs).unwrap(), r.scale(&Coefficient::int(-1)));
    }

    #[test]
    fn wildcard_rule_copies_types() {
        let rs = RuleSet::bundled();
        let e = ex("1 D1RL(a0,h1,h2) C0 I A1 A2");
        assert_eq!(apply_identities(&e, &rs).unwrap(), ex("-2i pi NJ(a0,h1,h2) C0 I A1 A2"));
    }

    #[test]
    fn conjugation_is_an_involution() {
        let e = ex("(1/2+1i) pi^-1 RE(h0,a1) NJ(a2,a3,a4) C0 C1 I A2 + 3 TRT10(h0,h1) RTX(h0,a1,h2,a2) I");
        assert_eq!(conjugate(&conjugate(&e)), e);
    }

    #[test]
    fn malformed_rules_are_rejected() {
        let bad = "[rule]\nname = x\nlhs = 2 RX\nrhs = 0\nsource = s\nformula = f\n";
        assert!(matches!(RuleSet::parse(bad), Err(RuleError::BadRule { .. })));
        let bad = "[rule]\nname = x\nlhs = RX\nsource = s\n";
        assert!(matches!(RuleSet::parse(bad), Err(RuleError::Syntax { .. })));
        let looping = "[rule]\nname = x\nlhs = RX\nrhs = 1 RX + 1 RX\nsource = s\nformula = f\n";
        let rs = RuleSet::parse(looping).unwrap();
        assert!(matches!(apply_identities(&ex("1 RX I"), &rs), Err(RuleError::NonTerminating(_))));
    }
}
