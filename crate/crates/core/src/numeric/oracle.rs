//! Dense-matrix oracle for the symbolic normal-ordering engine: the matrix
//! of a normal-ordered product must equal the product of the factor
//! matrices on states that no truncation can reach.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fock::{FockBasisSpec, FockSpace, Modes, NoAtoms};
use super::NumericError;
use crate::algebra::ModelOperator;
use crate::coefficient::Coefficient;
use crate::exterior::{AtomValues, ModelParams};
use crate::symbolic::{gen, Atom, Expr, GenKind, Head, Letter, Monomial, SlotType};

type C = Complex64;

/// Exact atom values seen as complex numbers.
pub struct Complexified<'a>(pub &'a dyn AtomValues<Coefficient>);

impl AtomValues<C> for Complexified<'_> {
    fn value(&self, head: Head, slots: &[(SlotType, usize)]) -> C {
        self.0.value(head, slots).to_complex64()
    }
}

fn degree(e: &Expr) -> usize {
    e.iter().map(|(m, _)| m.gens.len()).max().unwrap_or(0)
}

/// Largest entry of `matrix(normal_order(f₁⋯f_k)) − matrix(f₁)⋯matrix(f_k)`
/// over columns whose occupation leaves room for every raising step.
pub fn product_deviation(factors: &[Expr], space: &FockSpace, values: &dyn AtomValues<C>) -> Result<f64, NumericError> {
    let product = factors.iter().fold(Expr::one(), |acc, f| acc.mul(f));
    let reach: usize = factors.iter().map(degree).sum();
    let budget = space.spec.cutoff.saturating_sub(reach) as u32;
    let e = space.ext_dim();
    let mut dev: f64 = 0.0;
    for s in (0..space.states.len()).filter(|&s| space.total(s) <= budget) {
        for x in 0..e {
            let mut v = DVector::zeros(space.dim());
            v[s * e + x] = C::new(1.0, 0.0);
            let mut direct = v.clone();
            for f in factors.iter().rev() {
                direct = space.apply_expr(f, values, &direct)?;
            }
            let normal = space.apply_expr(&product, values, &v)?;
            dev = dev.max((direct - normal).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    Ok(dev)
}

/// Compares the normal-ordered product of `factors` against the product of
/// their matrices in the given basis (at `a_j = 2π`, the engine's normalization).
pub fn symbolic_numeric_oracle(
    factors: &[ModelOperator],
    spec: &FockBasisSpec,
    values: &dyn AtomValues<C>,
    tol: f64,
) -> Result<f64, NumericError> {
    let space = FockSpace::new(spec.clone(), ModelParams::standard(spec.n))?;
    let exprs: Vec<Expr> = factors.iter().map(|f| f.0.clone()).collect();
    let dev = product_deviation(&exprs, &space, values)?;
    if dev > tol {
        let word = factors.iter().map(|f| format!("({})", f.0)).collect::<Vec<_>>().join(" · ");
        return Err(NumericError::OracleFailure { word, deviation: dev, tolerance: tol });
    }
    Ok(dev)
}

const KINDS: [GenKind; 4] = [GenKind::B, GenKind::BPlus, GenKind::Z, GenKind::ZBar];

/// A random word of at most `max_degree` generators with concrete indices
/// in `0..n` (pinned labels), optionally with exterior letters, split into
/// its single-letter factors.
pub fn random_word(rng: &mut impl Rng, n: usize, max_degree: usize, exterior: bool) -> Vec<ModelOperator> {
    let k = rng.gen_range(1..=max_degree);
    let mut factors = Vec::with_capacity(k + 2);
    let num = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let head = Coefficient::ratio(num, rng.gen_range(1..=3));
    for i in 0..k {
        let kind = KINDS[rng.gen_range(0..KINDS.len())];
        let pin = Atom::pin(rng.gen_range(1..=n) as u32, 0);
        let m = Monomial::from_parts(vec![pin], vec![], vec![gen(kind, 0)]);
        let c = if i == 0 { head.clone() } else { Coefficient::one() };
        factors.push(ModelOperator(Expr::from_monomial(c, m)));
    }
    if exterior {
        for _ in 0..rng.gen_range(0..=2) {
            let letter = if rng.gen_bool(0.5) { Letter::C(0) } else { Letter::A(0) };
            let pin = Atom::pin(rng.gen_range(1..=n) as u32, 0);
            let m = Monomial::from_parts(vec![pin], vec![letter], vec![]);
            let pos = rng.gen_range(0..=factors.len());
            factors.insert(pos, ModelOperator(Expr::from_monomial(Coefficient::one(), m)));
        }
    }
    factors
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub trials: usize,
    pub max_deviation: f64,
}

/// Runs `trials` random words of degree ≤ 4 with `n ≤ n_max`.
pub fn random_word_trials(trials: usize, n_max: usize, seed: u64, tol: f64) -> Result<OracleSummary, NumericError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation: f64 = 0.0;
    for _ in 0..trials {
        let n = rng.gen_range(1..=n_max);
        let exterior = rng.gen_bool(0.5);
        let cutoff = if n == 1 { 10 } else { 8 };
        let spec = FockBasisSpec::new(n, cutoff, exterior, Modes::Full)?;
        let word = random_word(&mut rng, n, 4, exterior);
        max_deviation = max_deviation.max(symbolic_numeric_oracle(&word, &spec, &NoAtoms, tol)?);
    }
    Ok(OracleSummary { trials, max_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{build_l02, build_q1};
    use crate::geometry::random_instances;
    use crate::numeric::fock::fock_matrix;

    #[test]
    fn random_words_agree() {
        let s = random_word_trials(60, 2, 11, 1e-10).unwrap();
        assert!(s.max_deviation < 1e-10);
    }

    #[test]
    fn first_order_operator_products() {
        let geo = &random_instances(1, 5)[0];
        let values = Complexified(geo);
        let spec = FockBasisSpec::new(2, 5, true, Modes::Full).unwrap();
        let q1 = build_q1();
        let l02 = build_l02();
        for factors in [vec![q1.clone(), q1.clone()], vec![l02.clone(), q1.clone()], vec![q1, l02]] {
            let dev = symbolic_numeric_oracle(&factors, &spec, &values, 1e-10).unwrap();
            assert!(dev < 1e-10);
        }
    }

    #[test]
    fn l02_matrix_is_hermitian() {
        let spec = FockBasisSpec::new(2, 6, true, Modes::Full).unwrap();
        let m = fock_matrix(&build_l02(), &spec, &ModelParams::standard(2), &NoAtoms).unwrap();
        assert!(m.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn wrong_bracket_is_reported() {
        // b⁺b is not normal ordered as written; a corrupted "normal form"
        // that drops the commutator must be caught
        let space = FockSpace::new(FockBasisSpec::new(1, 6, false, Modes::Full).unwrap(), ModelParams::standard(1)).unwrap();
        let bp = ModelOperator::generator(GenKind::BPlus).0;
        let b = ModelOperator::generator(GenKind::B).0;
        let good = product_deviation(&[bp.clone(), b.clone()], &space, &NoAtoms).unwrap();
        assert!(good < 1e-10);
        let wrong = b.mul(&bp);
        let v = DVector::from_fn(space.dim(), |i, _| if i == 0 { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) });
        let lhs = space.apply_expr(&wrong, &NoAtoms, &v).unwrap();
        let rhs = space.apply_expr(&bp, &NoAtoms, &space.apply_expr(&b, &NoAtoms, &v).unwrap()).unwrap();
        assert!((lhs - rhs).norm() > 1.0);
    }
}
