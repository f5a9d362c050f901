//! Canonical forms of monomials up to dummy relabeling, atom reordering,
//! slot symmetries and (anti)commutation of like factors.

use std::collections::{BTreeMap, HashMap};

use crate::coefficient::Coefficient;

use super::order::{normalize, Ordering};
use super::term::{Atom, Gen, Head, Label, Letter, Monomial};

/// All permutations of `0..k` with their parity signs.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i8)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out.into_iter()
        .map(|p| {
            let inv = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            let s = if inv % 2 == 0 { 1 } else { -1 };
            (p, s)
        })
        .collect()
}

/// Renames labels in order of first appearance (atoms, then exterior word,
/// then generators) to `0, 1, 2, …`.
pub fn relabel(m: &mut Monomial) {
    let mut map: HashMap<Label, Label> = HashMap::new();
    m.for_each_label_mut(|l| {
        let next = map.len() as Label;
        *l = *map.entry(*l).or_insert(next);
    });
}

struct Choices {
    atom_orders: Vec<Vec<usize>>,
    ext_runs: Vec<(usize, usize)>,
    ext_perms: Vec<Vec<(Vec<usize>, i8)>>,
    gen_runs: Vec<(usize, usize)>,
    gen_perms: Vec<Vec<(Vec<usize>, i8)>>,
}

fn runs<T>(v: &[T], same: impl Fn(&T, &T) -> bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=v.len() {
        if i == v.len() || !same(&v[i - 1], &v[i]) {
            if i > start {
                out.push((start, i));
            }
            start = i;
        }
    }
    out
}

fn choices(m: &Monomial) -> Choices {
    let k = m.atoms.len();
    let re_positions: Vec<usize> = (0..k).filter(|&i| !m.atoms[i].head.commutes()).collect();
    let atom_orders = permutations(k)
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| {
            let seq: Vec<usize> = p.iter().copied().filter(|i| re_positions.contains(i)).collect();
            seq == re_positions
        })
        .collect();
    let ext_runs = runs(&m.ext, |x, y| {
        matches!((x, y), (Letter::C(_), Letter::C(_)) | (Letter::A(_), Letter::A(_)))
    });
    let ext_perms = ext_runs.iter().map(|(s, e)| permutations(e - s)).collect();
    let gen_runs = runs(&m.gens, |x: &Gen, y: &Gen| x.kind == y.kind);
    let gen_perms = gen_runs
        .iter()
        .map(|(s, e)| {
            permutations(e - s).into_iter().map(|(p, _)| (p, 1)).collect()
        })
        .collect();
    Choices { atom_orders, ext_runs, ext_perms, gen_runs, gen_perms }
}

/// Pins on the same label collapse, conflicting pins vanish, and labels
/// pinned to the same index are identified.
fn simplify_pins(m: &Monomial) -> Option<Monomial> {
    let mut out = m.clone();
    loop {
        let pins: Vec<(usize, u32, Label)> = out
            .atoms
            .iter()
            .enumerate()
            .filter_map(|(i, at)| match at.head {
                Head::Pin(k) => Some((i, k, at.slots[0].label)),
                _ => None,
            })
            .collect();
        let mut changed = false;
        'outer: for (x, &(_, k1, l1)) in pins.iter().enumerate() {
            for &(j, k2, l2) in &pins[x + 1..] {
                if l1 == l2 && k1 != k2 {
                    return None;
                }
                if k1 == k2 {
                    out.atoms.remove(j);
                    if l1 != l2 {
                        out.for_each_label_mut(|l| {
                            if *l == l2 {
                                *l = l1;
                            }
                        });
                    }
                    changed = true;
                    break 'outer;
                }
            }
        }
        if !changed {
            return Some(out);
        }
    }
}

/// Canonical representative of `m` and the sign relating it to `m`, or
/// `None` when the monomial is identically zero (type vanishing or a
/// symmetry mapping it to its own negative).
pub fn canonical(m: &Monomial) -> Option<(i8, Monomial)> {
    if m.atoms.iter().any(Atom::vanishes_by_type) {
        return None;
    }
    let m = &simplify_pins(m)?;
    let ch = choices(m);
    let atom_syms: Vec<&[(&[usize], i8)]> = m.atoms.iter().map(|a| a.head.symmetries()).collect();

    // mixed-radix enumeration over all independent choices
    let mut radices: Vec<usize> = vec![ch.atom_orders.len()];
    radices.extend(atom_syms.iter().map(|s| s.len()));
    radices.extend(ch.ext_perms.iter().map(Vec::len));
    radices.extend(ch.gen_perms.iter().map(Vec::len));
    let mut digits = vec![0usize; radices.len()];

    let mut best: Option<(i8, Monomial)> = None;
    let mut conflict = false;
    loop {
        let mut sign: i8 = 1;
        let mut cand = Monomial::default();
        let order = &ch.atom_orders[digits[0]];
        for &ai in order {
            let (perm, s) = atom_syms[ai][digits[1 + ai]];
            sign *= s;
            let at = &m.atoms[ai];
            cand.atoms.push(Atom {
                head: at.head,
                slots: perm.iter().map(|&p| at.slots[p]).collect(),
            });
        }
        let base = 1 + m.atoms.len();
        cand.ext = m.ext.clone();
        for (r, &(s, e)) in ch.ext_runs.iter().enumerate() {
            let (perm, ps) = &ch.ext_perms[r][digits[base + r]];
            sign *= ps;
            for (k, &p) in perm.iter().enumerate() {
                cand.ext[s + k] = m.ext[s + p];
            }
            let _ = e;
        }
        let base = base + ch.ext_runs.len();
        cand.gens = m.gens.clone();
        for (r, &(s, _)) in ch.gen_runs.iter().enumerate() {
            let (perm, _) = &ch.gen_perms[r][digits[base + r]];
            for (k, &p) in perm.iter().enumerate() {
                cand.gens[s + k] = m.gens[s + p];
            }
        }
        relabel(&mut cand);
        match &best {
            None => best = Some((sign, cand)),
            Some((bs, bm)) => match cand.cmp(bm) {
                std::cmp::Ordering::Less => {
                    best = Some((sign, cand));
                    conflict = false;
                }
                std::cmp::Ordering::Equal if *bs != sign => conflict = true,
                _ => {}
            },
        }

        // advance
        let mut i = 0;
        loop {
            if i == digits.len() {
                return if conflict { None } else { best };
            }
            digits[i] += 1;
            if digits[i] < radices[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// A linear combination of canonical monomials. Every stored monomial is in
/// normal form and canonical, so structural equality is mathematical
/// equality modulo the built-in symmetries.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Expr {
    terms: BTreeMap<Monomial, Coefficient>,
}

impl Expr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_monomial(Coefficient::one(), Monomial::one())
    }

    pub fn from_monomial(c: Coefficient, m: Monomial) -> Self {
        Self::collect(vec![(c, m)])
    }

    /// Normalizes and canonicalizes raw terms and sums like terms.
    pub fn collect(raw: Vec<(Coefficient, Monomial)>) -> Self {
        let mut memo: HashMap<Monomial, Option<(i8, Monomial)>> = HashMap::new();
        let mut out = Expr::zero();
        for (c, m) in raw {
            if c.is_zero() {
                continue;
            }
            for (c2, m2) in normalize(c, m, Ordering::Normal) {
                let canon = memo.entry(m2.clone()).or_insert_with(|| canonical(&m2)).clone();
                if let Some((s, cm)) = canon {
                    let c3 = if s < 0 { -c2 } else { c2 };
                    out.add_canonical(cm, &c3);
                }
            }
        }
        out
    }

    fn add_canonical(&mut self, m: Monomial, c: &Coefficient) {
        let e = self.terms.entry(m.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn raw(&self) -> Vec<(Coefficient, Monomial)> {
        self.terms.iter().map(|(m, c)| (c.clone(), m.clone())).collect()
    }

    pub fn add(&self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_canonical(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, rhs: &Expr) -> Expr {
        self.add(&rhs.scale(&Coefficient::int(-1)))
    }

    pub fn scale(&self, c: &Coefficient) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        let raw: Vec<_> = self.terms.iter().map(|(m, v)| (v * c, m.clone())).collect();
        // scaling by a multi-π coefficient keeps monomials canonical
        let mut out = Expr::zero();
        for (v, m) in raw {
            out.add_canonical(m, &v);
        }
        out
    }

    /// Ordered product; exterior words and generator words concatenate.
    pub fn mul(&self, rhs: &Expr) -> Expr {
        let mut raw = Vec::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                raw.push((c1 * c2, m1.product(m2)));
            }
        }
        Expr::collect(raw)
    }

    /// Applies `f` to every raw term and re-collects.
    pub fn map_terms(&self, f: impl Fn(&Coefficient, &Monomial) -> Vec<(Coefficient, Monomial)>) -> Expr {
        Expr::collect(self.terms.iter().flat_map(|(m, c)| f(c, m)).collect())
    }

    /// Keeps the terms satisfying `pred`.
    pub fn filter(&self, pred: impl Fn(&Monomial) -> bool) -> Expr {
        Expr {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Canonical monomials with their coefficients split by power of π,
    /// suitable for set comparisons.
    pub fn term_set(&self) -> Vec<(Monomial, Coefficient)> {
        self.terms
            .iter()
            .flat_map(|(m, c)| {
                c.terms()
                    .map(|(k, v)| (m.clone(), Coefficient::monomial(v.clone(), k)))
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::term::{a, gen, h, GenKind};

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().filter(|(_, s)| *s < 0).count(), 3);
    }

    #[test]
    fn relabeling_invariance() {
        let m1 = Monomial::from_parts(
            vec![Atom::nj(h(7), h(3), h(9)), Atom::nj(a(7), a(3), a(9))],
            vec![],
            vec![],
        );
        let m2 = Monomial::from_parts(
            vec![Atom::nj(a(1), a(2), a(0)), Atom::nj(h(1), h(2), h(0))],
            vec![],
            vec![],
        );
        assert_eq!(canonical(&m1), canonical(&m2));
    }

    #[test]
    fn antisymmetry_sign() {
        // a lone antisymmetric atom with all slots summed vanishes
        let lone = Monomial::from_parts(vec![Atom::nj(h(0), h(1), h(2))], vec![], vec![]);
        assert_eq!(canonical(&lone), None);
        let cc = vec![Letter::C(1), Letter::C(2)];
        let m1 = Monomial::from_parts(vec![Atom::nj(a(0), a(1), a(2))], cc.clone(), vec![gen(GenKind::B, 0)]);
        let m2 = Monomial::from_parts(vec![Atom::nj(a(0), a(2), a(1))], cc, vec![gen(GenKind::B, 0)]);
        let (s1, c1) = canonical(&m1).unwrap();
        let (s2, c2) = canonical(&m2).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(s1, -s2);
    }

    #[test]
    fn self_negating_terms_vanish() {
        // RE(a_l, a_m) C_l C_m survives, RE symmetric-contracted with z z does not
        let m = Monomial::from_parts(
            vec![Atom::re(a(0), a(1))],
            vec![],
            vec![gen(GenKind::Z, 0), gen(GenKind::Z, 1)],
        );
        assert_eq!(canonical(&m), None);
        let m = Monomial::from_parts(vec![Atom::re(a(0), a(1))], vec![Letter::C(0), Letter::C(1)], vec![]);
        assert!(canonical(&m).is_some());
        let m = Monomial::from_parts(vec![], vec![Letter::C(0), Letter::C(0)], vec![]);
        assert_eq!(canonical(&m), None);
    }

    #[test]
    fn collect_sums_like_terms() {
        let m1 = Monomial::from_parts(vec![Atom::re(a(0), a(1))], vec![Letter::C(0), Letter::C(1)], vec![]);
        let m2 = Monomial::from_parts(vec![Atom::re(a(1), a(0))], vec![Letter::C(0), Letter::C(1)], vec![]);
        let e = Expr::collect(vec![(Coefficient::one(), m1), (Coefficient::one(), m2)]);
        assert!(e.is_zero());
    }
}
