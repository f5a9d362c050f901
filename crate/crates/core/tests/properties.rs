use proptest::prelude::*;

use spinc_core::algebra::{adjoint, ModelOperator};
use spinc_core::numeric::fock::{FockSpace, NoAtoms};
use spinc_core::numeric::oracle::product_deviation;
use spinc_core::numeric::{FockBasisSpec, Modes};
use spinc_core::exterior::ModelParams;
use spinc_core::symbolic::{gen, Atom, GenKind, Letter, Monomial};
use spinc_core::tensor::canonicalize;
use spinc_core::{Coefficient, Expr};

const KINDS: [GenKind; 6] =
    [GenKind::B, GenKind::BPlus, GenKind::Z, GenKind::ZBar, GenKind::ZPrime, GenKind::ZBarPrime];

fn coefficient() -> impl Strategy<Value = Coefficient> {
    (-4i64..=4, 1i64..=3, -2i64..=2, -1i32..=1)
        .prop_filter("nonzero", |(re, _, im, _)| *re != 0 || *im != 0)
        .prop_map(|(re, den, im, pi)| Coefficient::new((re, den), (im, 1), pi))
}

/// One factor: a generator, or with `symbolic` also an exterior letter or a
/// scalar-curvature weight, with its index pinned to 1 or 2.
fn factor(symbolic: bool) -> impl Strategy<Value = Monomial> {
    let kinds = if symbolic { 0..KINDS.len() + 2 } else { 0..KINDS.len() };
    (kinds, 1u32..=2, any::<bool>()).prop_map(move |(k, pin, rx)| {
        let mut atoms = vec![Atom::pin(pin, 0)];
        if symbolic && rx {
            atoms.push(Atom::rx());
        }
        match k {
            k if k < KINDS.len() => Monomial::from_parts(atoms, vec![], vec![gen(KINDS[k], 0)]),
            k if k == KINDS.len() => Monomial::from_parts(atoms, vec![Letter::C(0)], vec![]),
            _ => Monomial::from_parts(atoms, vec![Letter::A(0)], vec![]),
        }
    })
}

/// A product of up to three factors, normal ordered.
fn word(symbolic: bool) -> impl Strategy<Value = Expr> {
    (coefficient(), prop::collection::vec(factor(symbolic), 0..=3)).prop_map(|(c, fs)| {
        fs.into_iter().fold(Expr::from_monomial(c, Monomial::one()), |acc, m| acc.mul(&Expr::from_monomial(Coefficient::one(), m)))
    })
}

fn expr() -> impl Strategy<Value = Expr> {
    prop::collection::vec(word(true), 1..=3).prop_map(|ws| ws.iter().fold(Expr::zero(), |acc, w| acc.add(w)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(x in expr(), y in expr(), z in expr()) {
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
    }

    #[test]
    fn product_distributes(x in expr(), y in expr(), z in expr()) {
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert_eq!(y.add(&z).mul(&x), y.mul(&x).add(&z.mul(&x)));
    }

    #[test]
    fn adjoint_is_an_involution(x in expr()) {
        let op = ModelOperator(x);
        prop_assert_eq!(adjoint(&adjoint(&op)), op);
    }

    #[test]
    fn adjoint_reverses_products(x in expr(), y in expr()) {
        let (a, b) = (ModelOperator(x), ModelOperator(y));
        let lhs = adjoint(&ModelOperator(a.0.mul(&b.0)));
        let rhs = adjoint(&b).0.mul(&adjoint(&a).0);
        prop_assert_eq!(lhs.0, rhs);
    }

    #[test]
    fn canonical_form_is_idempotent(x in expr()) {
        let once = canonicalize(&x);
        prop_assert_eq!(&once, &x);
        prop_assert_eq!(canonicalize(&once), once);
    }

    #[test]
    fn text_form_round_trips(x in expr()) {
        let back: Expr = x.to_string().parse().expect("printed expressions parse");
        prop_assert_eq!(back, x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normal_order_matches_matrix_products(ws in prop::collection::vec(word(false), 1..=3)) {
        let unprimed = |e: &Expr| e.iter().all(|(m, _)| !m.has_prime());
        prop_assume!(ws.iter().all(unprimed));
        let spec = FockBasisSpec::new(2, 8, false, Modes::Full).unwrap();
        let space = FockSpace::new(spec, ModelParams::standard(2)).unwrap();
        let dev = product_deviation(&ws, &space, &NoAtoms).unwrap();
        prop_assert!(dev < 1e-9, "deviation {}", dev);
    }
}
