//! Rewriting to normal form: generator words via the canonical commutation
//! relations, exterior words via the CAR and the vacuum projector.

use crate::coefficient::Coefficient;

use super::term::{Gen, GenKind, Letter, Monomial};

/// Ordering convention for generator words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ordering {
    /// primes ≺ `b` ≺ `z` ≺ `z̄` ≺ `b⁺`; the normal order of the engine.
    Normal,
    /// primes ≺ `z` ≺ `b` ≺ `z̄` ≺ `b⁺`; used to evaluate at `Z = 0`.
    CoordinatesFirst,
}

impl Ordering {
    fn rank(self, k: GenKind) -> u8 {
        match (self, k) {
            (_, GenKind::ZPrime) => 0,
            (_, GenKind::ZBarPrime) => 1,
            (Ordering::Normal, GenKind::B) => 2,
            (Ordering::Normal, GenKind::Z) => 3,
            (Ordering::CoordinatesFirst, GenKind::Z) => 2,
            (Ordering::CoordinatesFirst, GenKind::B) => 3,
            (_, GenKind::ZBar) => 4,
            (_, GenKind::BPlus) => 5,
        }
    }
}

/// `[x_i, y_j] = c · δ_ij`; returns `c` (or `None` when the pair commutes).
pub fn bracket(x: GenKind, y: GenKind) -> Option<Coefficient> {
    use GenKind::*;
    match (x, y) {
        (B, BPlus) => Some(Coefficient::new((-4, 1), (0, 1), 1)),
        (BPlus, B) => Some(Coefficient::new((4, 1), (0, 1), 1)),
        (Z, B) => Some(Coefficient::int(2)),
        (B, Z) => Some(Coefficient::int(-2)),
        (ZBar, BPlus) => Some(Coefficient::int(-2)),
        (BPlus, ZBar) => Some(Coefficient::int(2)),
        _ => None,
    }
}

/// Brings the generator word into the requested order. Each adjacent
/// inversion `x y` is replaced by `y x + [x, y]`.
pub fn order_generators(
    coeff: Coefficient,
    m: Monomial,
    ordering: Ordering,
) -> Vec<(Coefficient, Monomial)> {
    let mut out = Vec::new();
    let mut stack = vec![(coeff, m)];
    while let Some((c, mut m)) = stack.pop() {
        let pos = m
            .gens
            .windows(2)
            .position(|w| ordering.rank(w[0].kind) > ordering.rank(w[1].kind));
        let Some(p) = pos else {
            out.push((c, m));
            continue;
        };
        let (x, y): (Gen, Gen) = (m.gens[p], m.gens[p + 1]);
        if let Some(k) = bracket(x.kind, y.kind) {
            let mut r = m.clone();
            r.gens.drain(p..p + 2);
            r.contract(x.label, y.label);
            stack.push((&c * &k, r));
        }
        m.gens.swap(p, p + 1);
        stack.push((c, m));
    }
    out
}

/// Brings the exterior word into the form `C… [I] A…`:
/// `A_m C_l = δ_lm − C_l A_m`, `A I = 0`, `I C = 0`, `I I = I`.
pub fn normalize_ext(coeff: Coefficient, m: Monomial) -> Vec<(Coefficient, Monomial)> {
    let mut out = Vec::new();
    let mut stack = vec![(coeff, m)];
    while let Some((c, mut m)) = stack.pop() {
        let pos = m.ext.windows(2).position(|w| {
            matches!(
                (w[0], w[1]),
                (Letter::A(_), Letter::C(_))
                    | (Letter::A(_), Letter::I)
                    | (Letter::I, Letter::C(_))
                    | (Letter::I, Letter::I)
            )
        });
        let Some(p) = pos else {
            out.push((c, m));
            continue;
        };
        match (m.ext[p], m.ext[p + 1]) {
            (Letter::A(mm), Letter::C(l)) => {
                let mut r = m.clone();
                r.ext.drain(p..p + 2);
                r.contract(l, mm);
                stack.push((c.clone(), r));
                m.ext.swap(p, p + 1);
                stack.push((-c, m));
            }
            (Letter::I, Letter::I) => {
                m.ext.remove(p);
                stack.push((c, m));
            }
            _ => {}
        }
    }
    out
}

/// Full normal form: exterior word first, then generators.
pub fn normalize(coeff: Coefficient, m: Monomial, ordering: Ordering) -> Vec<(Coefficient, Monomial)> {
    normalize_ext(coeff, m)
        .into_iter()
        .flat_map(|(c, m)| order_generators(c, m, ordering))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::term::gen;

    #[test]
    fn bracket_is_antisymmetric() {
        use GenKind::*;
        let all = [B, BPlus, Z, ZBar, ZPrime, ZBarPrime];
        for x in all {
            for y in all {
                match (bracket(x, y), bracket(y, x)) {
                    (None, None) => {}
                    (Some(p), Some(q)) => assert!((&p + &q).is_zero()),
                    _ => panic!("asymmetric table for {x:?} {y:?}"),
                }
            }
        }
    }

    #[test]
    fn swap_produces_contracted_term() {
        let m = Monomial::from_parts(
            vec![],
            vec![],
            vec![gen(GenKind::BPlus, 0), gen(GenKind::B, 1)],
        );
        let out = order_generators(Coefficient::one(), m, Ordering::Normal);
        assert_eq!(out.len(), 2);
        let scalar = out.iter().find(|(_, m)| m.gens.is_empty()).unwrap();
        assert_eq!(scalar.0, Coefficient::new((4, 1), (0, 1), 1));
        assert_eq!(scalar.1.atoms.len(), 1, "free contraction yields n");
    }

    #[test]
    fn car_relation() {
        let m = Monomial::from_parts(vec![], vec![Letter::A(0), Letter::C(1)], vec![]);
        let out = normalize_ext(Coefficient::one(), m);
        assert_eq!(out.len(), 2);
        assert!(out.iter().any(|(c, m)| m.ext == vec![Letter::C(1), Letter::A(0)]
            && *c == Coefficient::int(-1)));
    }

    #[test]
    fn projector_kills_outer_letters() {
        let m = Monomial::from_parts(vec![], vec![Letter::A(0), Letter::I], vec![]);
        assert!(normalize_ext(Coefficient::one(), m).is_empty());
        let m = Monomial::from_parts(vec![], vec![Letter::I, Letter::C(0)], vec![]);
        assert!(normalize_ext(Coefficient::one(), m).is_empty());
    }
}
