//! The model Weyl–Fock algebra: operators in `b, b⁺, z, z̄` (with
//! exterior and tensor coefficients), their action on the model Bergman
//! kernel `P^N`, the resolvent of the model operator, and evaluations of
//! kernels at the origin.

use thiserror::Error;

use crate::coefficient::Coefficient;
use crate::symbolic::order::{order_generators, Ordering};
use crate::symbolic::{gen, Expr, GenKind, Letter, Monomial, ParseError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("resolvent applied to a term with eigenvalue 0 without projection: {0}")]
    DivisionByZeroEigenvalue(String),
    #[error("term has no vacuum projector: {0}")]
    NotAKernelState(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A differential operator on `ℝ^{2n}` with coefficients in `End(Λ(T^{*(0,1)}))`
/// and tensor atoms, stored in normal order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelOperator(pub Expr);

/// A kernel of the form `F(b, z, z̄′, z′) · (word) · P^N(Z, Z′)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KernelState(pub Expr);

impl ModelOperator {
    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        Ok(Self(text.parse()?))
    }

    pub fn generator(kind: GenKind) -> Self {
        Self(Expr::from_monomial(
            Coefficient::one(),
            Monomial::from_parts(vec![], vec![], vec![gen(kind, 0)]),
        ))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self(self.0.add(&rhs.0))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self(self.0.sub(&rhs.0))
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        Self(self.0.scale(c))
    }
}

pub fn multiply(a: &ModelOperator, b: &ModelOperator) -> ModelOperator {
    ModelOperator(a.0.mul(&b.0))
}

pub fn commutator(a: &ModelOperator, b: &ModelOperator) -> ModelOperator {
    multiply(a, b).sub(&multiply(b, a))
}

/// Formal adjoint of a single raw term (not yet normal ordered).
pub fn adjoint_term(c: &Coefficient, m: &Monomial) -> (Coefficient, Monomial) {
    let mut coeff = c.conj();
    let mut out = Monomial::one();
    for at in m.atoms.iter().rev() {
        let (s, conj) = at.conj();
        if s < 0 {
            coeff = -coeff;
        }
        out.atoms.push(conj);
    }
    for l in m.ext.iter().rev() {
        out.ext.push(match *l {
            Letter::C(x) => {
                coeff = &coeff * &Coefficient::int(2);
                Letter::A(x)
            }
            Letter::A(x) => {
                coeff = &coeff * &Coefficient::ratio(1, 2);
                Letter::C(x)
            }
            Letter::I => Letter::I,
        });
    }
    out.gens = m
        .gens
        .iter()
        .rev()
        .map(|g| gen(g.kind.adjoint(), g.label))
        .collect();
    (coeff, out)
}

/// Formal adjoint with respect to `L²(ℝ^{2n}) ⊗ Λ` with the metric in which
/// `|dz̄_l|² = 2`.
pub fn adjoint(op: &ModelOperator) -> ModelOperator {
    ModelOperator(op.0.map_terms(|c, m| vec![adjoint_term(c, m)]))
}

/// The model Bergman kernel `P^N = I · P(Z, Z′)`.
pub fn vacuum() -> KernelState {
    KernelState(Expr::from_monomial(
        Coefficient::one(),
        Monomial::from_parts(vec![], vec![Letter::I], vec![]),
    ))
}

/// Reduces a product ending in `P^N` to kernel-state normal form:
/// `b⁺ P^N = 0` and `z̄_l P^N = (2π)^{-1} b_l P^N + z̄′_l P^N`.
fn reduce_vacuum(e: Expr) -> Expr {
    let mut done = Expr::zero();
    let mut work = e;
    let inv_2pi = Coefficient::new((1, 2), (0, 1), -1);
    loop {
        let mut raw = Vec::new();
        for (m, c) in work.iter() {
            if m.count(GenKind::BPlus) > 0 {
                continue;
            }
            if let Some(p) = m.gens.iter().rposition(|g| g.kind == GenKind::ZBar) {
                let l = m.gens[p].label;
                let mut to_b = m.clone();
                to_b.gens.remove(p);
                to_b.gens.push(gen(GenKind::B, l));
                raw.push((c * &inv_2pi, to_b));
                let mut to_prime = m.clone();
                to_prime.gens[p].kind = GenKind::ZBarPrime;
                raw.push((c.clone(), to_prime));
            } else {
                done = done.add(&Expr::from_monomial(c.clone(), m.clone()));
            }
        }
        if raw.is_empty() {
            return done;
        }
        work = Expr::collect(raw);
    }
}

/// `op ∘ state`.
pub fn act(op: &ModelOperator, state: &KernelState) -> KernelState {
    KernelState(reduce_vacuum(op.0.mul(&state.0)))
}

/// `op ∘ P^N`.
pub fn apply_to_pn(op: &ModelOperator) -> KernelState {
    act(op, &vacuum())
}

/// Eigenvalue of `L₀` on the term `b^α … (C I A) P^N`: `4π(|α| + deg C)`,
/// returned as the integer `|α| + deg C`.
pub fn level(m: &Monomial) -> usize {
    m.count(GenKind::B) + m.creation_degree()
}

/// `L₀^{-1}` on each term; with `project` the eigenvalue-0 part is removed
/// first (i.e. `L₀^{-1} P^⊥`).
pub fn resolvent(state: &KernelState, project: bool) -> Result<KernelState, AlgebraError> {
    let mut raw = Vec::new();
    for (m, c) in state.0.iter() {
        if !m.ext.contains(&Letter::I) {
            return Err(AlgebraError::NotAKernelState(m.to_string()));
        }
        let k = level(m) as i64;
        if k == 0 {
            if project {
                continue;
            }
            return Err(AlgebraError::DivisionByZeroEigenvalue(m.to_string()));
        }
        let inv = Coefficient::new((1, 4 * k), (0, 1), -1);
        raw.push((c * &inv, m.clone()));
    }
    Ok(KernelState(Expr::collect(raw)))
}

/// `P^⊥` applied from the left.
pub fn project_perp(state: &KernelState) -> KernelState {
    KernelState(state.0.filter(|m| level(m) != 0))
}

/// `P^N` applied from the left: keeps the lowest-level terms without
/// creation letters.
pub fn project_vacuum_left(state: &KernelState) -> KernelState {
    KernelState(state.0.filter(|m| level(m) == 0))
}

fn reorder(e: &Expr, ordering: Ordering) -> Vec<(Coefficient, Monomial)> {
    e.iter()
        .flat_map(|(m, c)| order_generators(c.clone(), m.clone(), ordering))
        .collect()
}

/// Value of the kernel at `Z = Z′ = 0`.
pub fn eval_origin(state: &KernelState) -> Expr {
    let no_primes = state.0.filter(|m| !m.has_prime());
    Expr::collect(
        reorder(&no_primes, Ordering::CoordinatesFirst)
            .into_iter()
            .filter(|(_, m)| m.gens.is_empty())
            .collect(),
    )
}

/// Restriction `K(0, W)` as a polynomial in `w = z′`, `w̄ = z̄′`
/// (implicit factor `e^{-π|W|²/2}`).
pub fn slice_at_origin(state: &KernelState) -> Expr {
    let minus_2pi = Coefficient::new((-2, 1), (0, 1), 1);
    Expr::collect(
        reorder(&state.0, Ordering::CoordinatesFirst)
            .into_iter()
            .filter(|(_, m)| m.count(GenKind::Z) == 0)
            .map(|(mut c, mut m)| {
                for g in m.gens.iter_mut().filter(|g| g.kind == GenKind::B) {
                    g.kind = GenKind::ZBarPrime;
                    c = &c * &minus_2pi;
                }
                (c, m)
            })
            .collect(),
    )
}

/// Restriction `K(Z, 0)` as a kernel state.
pub fn restrict_prime_origin(state: &KernelState) -> KernelState {
    KernelState(state.0.filter(|m| !m.has_prime()))
}

/// Restriction `K(W, 0)` as a polynomial in `w`, `w̄` (same representation
/// as [`slice_at_origin`]).
pub fn slice_at_prime_origin(state: &KernelState) -> Expr {
    let two_pi = Coefficient::new((2, 1), (0, 1), 1);
    let restricted = restrict_prime_origin(state);
    Expr::collect(
        reorder(&restricted.0, Ordering::CoordinatesFirst)
            .into_iter()
            .map(|(mut c, mut m)| {
                for g in m.gens.iter_mut() {
                    match g.kind {
                        GenKind::Z => g.kind = GenKind::ZPrime,
                        GenKind::B => {
                            g.kind = GenKind::ZBarPrime;
                            c = &c * &two_pi;
                        }
                        _ => {}
                    }
                }
                (c, m)
            })
            .collect(),
    )
}

/// `S ↦ S*`: for `S(W) = K(0, W)` returns `K*(W, 0)`.
pub fn adjoint_slice(slice: &Expr) -> Expr {
    slice.map_terms(|c, m| vec![adjoint_term(c, m)])
}

/// `∫_ℂ z^a z̄^b e^{-π|z|²} dz` (Lebesgue measure).
pub fn gaussian_moment(a: u32, b: u32) -> Coefficient {
    if a != b {
        return Coefficient::zero();
    }
    let fact: i64 = (1..=a as i64).product();
    Coefficient::new((fact, 1), (0, 1), -(a as i32))
}

fn wick(c: Coefficient, m: Monomial, out: &mut Vec<(Coefficient, Monomial)>) {
    let Some(p) = m.gens.iter().position(|g| g.kind == GenKind::ZPrime) else {
        if m.count(GenKind::ZBarPrime) == 0 {
            out.push((c, m));
        }
        return;
    };
    let inv_pi = Coefficient::pi_pow(-1);
    for q in 0..m.gens.len() {
        if m.gens[q].kind != GenKind::ZBarPrime {
            continue;
        }
        let (lp, lq) = (m.gens[p].label, m.gens[q].label);
        let mut r = m.clone();
        r.gens.remove(p.max(q));
        r.gens.remove(p.min(q));
        r.contract(lp, lq);
        wick(&c * &inv_pi, r, out);
    }
}

/// `∫ S(W) e^{-π|W|²} dW` for a polynomial slice `S`.
pub fn gaussian_integral(slice: &Expr) -> Expr {
    let mut raw = Vec::new();
    for (m, c) in slice.iter() {
        wick(c.clone(), m.clone(), &mut raw);
    }
    Expr::collect(raw)
}

/// `∫ A(W) B(W) e^{-π|W|²} dW` with exterior words multiplied in order.
pub fn integrate_slices(a: &Expr, b: &Expr) -> Expr {
    gaussian_integral(&a.mul(b))
}
