//! Model operators of the rescaled expansion and the assembly of the first
//! two kernel coefficients.
//!
//! Vector arguments are expanded in the coordinate frame `∂z_j`, `∂z̄_j`:
//! the radial field is `ℛ = z_j ∂z_j + z̄_j ∂z̄_j`, and a real orthonormal
//! frame contracted with `∇_0` gives `Σ_i T(e_i) ∇_{0,e_i} = T(∂z_j) b⁺_j − T(∂z̄_j) b_j`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    adjoint, apply_to_pn, act, commutator, eval_origin, integrate_slices, project_perp,
    resolvent, slice_at_origin, slice_at_prime_origin, adjoint_slice, AlgebraError,
    ModelOperator,
};
use crate::coefficient::Coefficient;
use crate::exterior::{clifford_quadratic, frame_trace, lambda_trace, ExtEnd, ExteriorError};
use crate::symbolic::{gen, Expr, GenKind, Label, Monomial, SlotType};
use crate::tensor::{apply_identities, RuleError, RuleSet};

type Raw = Vec<(Coefficient, Monomial)>;

fn raw(text: &str) -> Raw {
    crate::symbolic::text::parse_terms(text, false).expect("built-in template").terms
}

/// One way of filling a vector slot: slot type, generator appended on the
/// right, and a sign.
type Choice = (SlotType, Option<GenKind>, i64);

/// `ℛ = z_j ∂z_j + z̄_j ∂z̄_j`.
const RADIAL: [Choice; 2] = [(SlotType::Hol, Some(GenKind::Z), 1), (SlotType::Anti, Some(GenKind::ZBar), 1)];

/// `Σ_i T(e_i) ∇_{0,e_i}` in creation/annihilation form.
const NABLA: [Choice; 2] = [(SlotType::Hol, Some(GenKind::BPlus), 1), (SlotType::Anti, Some(GenKind::B), -1)];

/// Expands every slot labelled `label` according to `choices`.
fn expand(terms: Raw, label: Label, choices: &[Choice]) -> Raw {
    let mut out = Vec::new();
    for (c, m) in terms {
        for (ty, kind, sign) in choices {
            let mut mm = m.clone();
            for at in &mut mm.atoms {
                for s in &mut at.slots {
                    if s.label == label {
                        s.ty = *ty;
                    }
                }
            }
            if let Some(k) = kind {
                mm.gens.push(gen(*k, label));
            }
            out.push((&c * &Coefficient::int(*sign), mm));
        }
    }
    out
}

fn op(text: &str) -> ModelOperator {
    ModelOperator::parse(text).expect("built-in operator")
}

/// `𝓛₀ = b_j b⁺_j`.
pub fn build_l0() -> ModelOperator {
    op("1 b0 bp0")
}

/// `L⁰₂ = b_j b⁺_j + 4π dz̄_j ∧ i_{∂z̄_j}` (`a_j = 2π`).
pub fn build_l02() -> ModelOperator {
    op("1 b0 bp0 + 4 pi C0 A0")
}

/// First-order correction in the form with the line-bundle derivative
/// `D1RL` still present:
/// `−⅔ (∇_ℛ R^L)(ℛ, e_i) ∇_{0,e_i} − ⅓ (∇_{e_i} R^L)(ℛ, e_i)`.
pub fn build_o1_general() -> ModelOperator {
    let first = expand(expand(raw("-2/3 D1RL(h0,h1,h2)"), 0, &RADIAL), 1, &RADIAL);
    let first = expand(first, 2, &NABLA);
    let second = expand(raw("-1/3 D1RL(h0,h1,h2)"), 1, &RADIAL);
    let second = frame_trace(&second, 0, 2);
    ModelOperator(Expr::collect(first).add(&second))
}

/// `𝓞₁ = −(4πi/3) b_i ⟨(∇_{z̄}J)z̄, ∂z̄_i⟩ + (4πi/3) ⟨(∇_z J)z, ∂z_i⟩ b⁺_i`.
pub fn build_o1() -> ModelOperator {
    op("-4/3i pi NJ(a1,a2,a0) b0 zb1 zb2 + 4/3i pi NJ(h1,h2,h0) z1 z2 bp0")
}

/// `𝒬₁ = 𝓞₁ − 2πi[⟨(∇_{z̄}J)∂z̄_l, ∂z̄_m⟩ dz̄_l dz̄_m + 4⟨(∇_z J)∂z_l, ∂z_m⟩ i_{∂z̄_l} i_{∂z̄_m}]`.
pub fn build_q1() -> ModelOperator {
    build_o1().add(&op("-2i pi NJ(a0,a1,a2) zb0 C1 C2 + -8i pi NJ(h0,h1,h2) z0 A1 A2"))
}

/// `𝒬₁` from the Clifford form `𝓞₁ − πi ⟨(∇_ℛ J)e_l, e_m⟩ c(e_l) c(e_m)`.
pub fn build_q1_clifford() -> ModelOperator {
    let t = expand(raw("-1i pi NJ(h0,h1,h2)"), 0, &RADIAL);
    build_o1().add(&ModelOperator(clifford_quadratic(&t, 1, 2)))
}

/// `R^Cliff(x, y) = ¼ ⟨R^{TX}(x,y) e_l, e_m⟩ c(e_l) c(e_m) + ½ tr R^{T^{(1,0)}}(x, y)`
/// with `x = ℛ` and `y` contracted against `−∇_{0,e_i}`.
fn radial_clifford_connection() -> Expr {
    const MINUS_NABLA: [Choice; 2] =
        [(SlotType::Hol, Some(GenKind::BPlus), -1), (SlotType::Anti, Some(GenKind::B), 1)];
    let rtx = expand(expand(raw("1/4 RTX(h0,h1,h2,h3)"), 0, &RADIAL), 1, &MINUS_NABLA);
    let trace = expand(expand(raw("1/2 TRT10(h0,h1)"), 0, &RADIAL), 1, &MINUS_NABLA);
    clifford_quadratic(&rtx, 2, 3).add(&Expr::collect(trace))
}

/// `𝒬₂ − 𝓞₂`.
pub fn build_q2_minus_o2() -> ModelOperator {
    let nnj = expand(expand(raw("-1/2i pi NNJ(h0,h1,h2,h3)"), 0, &RADIAL), 1, &RADIAL);
    let twist = raw("1/2 RE(h2,h3) + 1/4 TRT10(h2,h3)");
    let e = radial_clifford_connection()
        .add(&clifford_quadratic(&nnj, 2, 3))
        .add(&clifford_quadratic(&twist, 2, 3))
        .add(&"1/4 RX".parse().expect("scalar curvature"));
    ModelOperator(e)
}

/// `𝓞₂`, kept with the second derivatives `D2RL`, `D2TAU` of `R^L`, `τ`.
pub fn build_o2() -> ModelOperator {
    // ⅓ ⟨R(ℛ, e_i) ℛ, e_j⟩ ∇_i ∇_j
    let t = raw("1/3 RTX(h0,h1,h2,h3)");
    let t = expand(expand(t, 0, &RADIAL), 2, &RADIAL);
    let second_order = Expr::collect(expand(expand(t, 1, &NABLA), 3, &NABLA));
    // ⅔ ⟨R(ℛ, e_j) e_j, e_i⟩ ∇_i
    let ric = expand(expand(raw("2/3 RTX(h0,h1,h2,h3)"), 0, &RADIAL), 3, &NABLA);
    let ric = frame_trace(&ric, 1, 2);
    // −(½ Σ ∂^α R^L Z^α/α! + R^E)(ℛ, e_i) ∇_i, with Σ_{|α|=2} ∂^α R^L Z^α/α! = ½ D2RL(ℛ,ℛ,·,·)
    let d2 = raw("-1/4 D2RL(h0,h1,h2,h3)");
    let d2 = expand(expand(expand(d2, 0, &RADIAL), 1, &RADIAL), 2, &RADIAL);
    let re = expand(raw("-1 RE(h2,h3)"), 2, &RADIAL);
    let first_order = Expr::collect(expand(d2.into_iter().chain(re).collect(), 3, &NABLA));
    // −¼ ∇_{e_i}(½ D2RL(ℛ,ℛ,ℛ,e_i)): the derivative of the coefficient is the
    // commutator with ∇_{0,e_i} (built in one label space so that the
    // derivative index stays contracted with the slot)
    let coeff = raw("-1/8 D2RL(h0,h1,h2,h3)");
    let coeff = expand(expand(expand(coeff, 0, &RADIAL), 1, &RADIAL), 2, &RADIAL);
    let mut deriv = Vec::new();
    for (c, m) in expand(coeff, 3, &NABLA) {
        let d = *m.gens.last().expect("derivative");
        let mut f = m.clone();
        f.gens.pop();
        let mut left = f.clone();
        left.gens.insert(0, d);
        deriv.push((c.clone(), left));
        deriv.push((-c, m));
    }
    let deriv = Expr::collect(deriv);
    // −1/9 Σ_i [(∇_ℛ R^L)(ℛ, e_i)]²
    let sq = raw("-1/9 D1RL(h0,h1,h2) D1RL(h3,h4,h5)");
    let sq = [0, 1, 3, 4].iter().fold(sq, |acc, &l| expand(acc, l, &RADIAL));
    let sq = frame_trace(&sq, 2, 5);
    // −1/12 [𝓛₀, ⟨R(ℛ, e_i) ℛ, e_i⟩]
    let rr = frame_trace(&expand(expand(raw("1/1 RTX(h0,h1,h2,h3)"), 0, &RADIAL), 2, &RADIAL), 1, 3);
    let bracket = commutator(&build_l0(), &ModelOperator(rr)).0.scale(&Coefficient::ratio(-1, 12));
    // −Σ ∂^α τ Z^α/α! = −½ D2TAU(ℛ, ℛ)
    let tau = Expr::collect(expand(expand(raw("-1/2 D2TAU(h0,h1)"), 0, &RADIAL), 1, &RADIAL));
    ModelOperator(
        second_order
            .add(&ric)
            .add(&first_order)
            .add(&deriv)
            .add(&sq)
            .add(&bracket)
            .add(&tau),
    )
}

/// `𝒬₂ = 𝓞₂ + (𝒬₂ − 𝓞₂)` (the ∂²τ terms cancel).
pub fn build_q2() -> ModelOperator {
    let tau = Expr::collect(expand(expand(raw("1/2 D2TAU(h0,h1)"), 0, &RADIAL), 1, &RADIAL));
    build_o2().add(&build_q2_minus_o2()).add(&ModelOperator(tau))
}

/// Closed forms every intermediate is checked against.
pub mod expected {
    /// `𝒬₁ P^N`.
    pub const Q1_ON_VACUUM: &str = "-2/3i NJ(a1,a2,a0) b0 b1 zbp2 I + -4/3i pi NJ(a1,a2,a0) b0 zbp1 zbp2 I \
        + -1i NJ(a0,a1,a2) b0 C1 C2 I + -2i pi NJ(a0,a1,a2) zbp0 C1 C2 I";
    /// `(L⁰₂)⁻¹ P^⊥ 𝒬₁ P^N`.
    pub const RESOLVED_Q1: &str = "-1/12i pi^-1 NJ(a1,a2,a0) b0 b1 zbp2 I + -1/3i NJ(a1,a2,a0) b0 zbp1 zbp2 I \
        + -1/12i pi^-1 NJ(a0,a1,a2) b0 C1 C2 I + -1/4i NJ(a0,a1,a2) zbp0 C1 C2 I";
    /// The resolved state at `(0, W)`, as a polynomial in `w̄ = zbp`.
    pub const RESOLVED_AT_ORIGIN_LEFT: &str = "-1/12i NJ(a0,a1,a2) zbp0 C1 C2 I";
    /// The resolved state at `(W, 0)`.
    pub const RESOLVED_AT_ORIGIN_RIGHT: &str = "-1/6i NJ(a0,a1,a2) zbp0 C1 C2 I";
    /// Adjoint of [`RESOLVED_AT_ORIGIN_LEFT`], at `(W, 0)`.
    pub const ADJOINT_LEFT: &str = "1/3i NJ(h0,h1,h2) zp0 I A2 A1";
    /// Adjoint of [`RESOLVED_AT_ORIGIN_RIGHT`], at `(0, W)`.
    pub const ADJOINT_RIGHT: &str = "2/3i NJ(h0,h1,h2) zp0 I A2 A1";
    /// `(P^⊥ (L⁰₂)⁻¹ 𝒬₁ P^N 𝒬₁ (L⁰₂)⁻¹ P^⊥)(0,0)`.
    pub const OUTER_QUADRATIC: &str = "1/36 pi^-1 NJ(a0,a1,a2) NJ(h0,h3,h4) C1 C2 I A4 A3";
    /// `−(P^N 𝒬₁ P^⊥ (L⁰₂)⁻² 𝒬₁ P^N)(0,0)`.
    pub const INNER_QUADRATIC: &str = "-2/9 pi^-1 NJ(h0,h1,h2) NJ(a0,a1,a2) I";
    /// `((L⁰₂)⁻¹ P^⊥ 𝒬₁ (L⁰₂)⁻¹ P^⊥ 𝒬₁ P^N)(0,0)`.
    pub const DOUBLE_RESOLVENT: &str = "-2/3 pi^-1 NJ(h0,h1,h2) NJ(a0,a1,a2) I";
    /// `−((L⁰₂)⁻¹ P^⊥ (𝒬₂ − 𝓞₂) P^N)(0,0)` before the curvature identities.
    pub const SECOND_ORDER_RAW: &str = "1/4 pi^-1 TRT10(h0,a0) I + -1/2 pi^-1 RTX(h0,a0,h1,a1) I \
        + 1i pi^-1 NNJ(h0,a0,h1,a1) I + 1/24 pi^-1 RTX(h0,a0,a1,a2) C1 C2 I \
        + 1/12i pi^-1 NNJ(a0,h0,a1,a2) C1 C2 I + -1/8 pi^-1 RE(a1,a2) C1 C2 I \
        + -1/16 pi^-1 TRT10(a1,a2) C1 C2 I";
    /// Same quantity after the curvature identities.
    pub const SECOND_ORDER: &str = "3/4 pi^-1 NJ(h0,h1,h2) NJ(a0,a1,a2) I \
        + -1/12 pi^-1 RTX(a1,a2,h0,a0) C1 C2 I + -1/8 pi^-1 RE(a1,a2) C1 C2 I";
    /// Imported value of `−(𝓛₀⁻¹ P^⊥ 𝓞₂ P^N)(0,0)`.
    pub const IMPORTED_O2: &str = "1/2 pi^-1 RTX(h0,a1,h1,a0) I + 1/2 pi^-1 RE(h0,a0) I";
    /// `b₁` in the coordinate frame.
    pub const COEFFICIENT_COORDINATES: &str = "1 pi^-1 RTX(h0,a1,h1,a0) I + 1 pi^-1 RE(h0,a0) I \
        + -1/18 pi^-1 NJ(h0,h1,h2) NJ(a0,a1,a2) I \
        + 1/36 pi^-1 NJ(a0,a1,a2) NJ(h0,h3,h4) C1 C2 I A4 A3 \
        + -1/12 pi^-1 RTX(a1,a2,h0,a0) C1 C2 I + -1/8 pi^-1 RE(a1,a2) C1 C2 I \
        + 1/3 pi^-1 RTX(h1,h2,h0,a0) I A2 A1 + 1/2 pi^-1 RE(h1,h2) I A2 A1";
    /// `|∇J|² = Σ_{ij} |(∇_{e_i}J) e_j|²` in the coordinate frame.
    pub const NABLA_J_NORM_SQ: &str = "16 NJ(h0,h1,h2) NJ(a0,a1,a2)";
    /// `b₁` in the unitary frame `w_j = √2 ∂z_j`, rewritten with
    /// `w̄^l = dz̄_l/√2`, `i_{w̄_l} = √2 i_{∂z̄_l}`:
    /// `(1/8π)[r + ¼|∇J|² + 4R^E(w_j,w̄_j)] − (1/144π)Σ|(∇_{w_k}J)w_l|²
    /// + (1/288π)⟨(∇_{w̄_k}J)w̄_l,w̄_m⟩⟨(∇_{w_k}J)w_i,w_j⟩ w̄^l w̄^m i_{w̄_j} i_{w̄_i}
    /// ∓ (1/8π)(⅓⟨R w_i, w̄_i⟩ + R^E)(…) on the (0,2) and (2,0) parts`.
    pub const COEFFICIENT_UNITARY: &str = "1/8 pi^-1 RX I + 1/2 pi^-1 NJ(h0,h1,h2) NJ(a0,a1,a2) I \
        + 1 pi^-1 RE(h0,a0) I + -1/18 pi^-1 NJ(h0,h1,h2) NJ(a0,a1,a2) I \
        + 1/36 pi^-1 NJ(a0,a1,a2) NJ(h0,h3,h4) C1 C2 I A4 A3 \
        + -1/12 pi^-1 RTX(a1,a2,h0,a0) C1 C2 I + -1/8 pi^-1 RE(a1,a2) C1 C2 I \
        + 1/3 pi^-1 RTX(h1,h2,h0,a0) I A2 A1 + 1/2 pi^-1 RE(h1,h2) I A2 A1";
    /// `tr_Λ b₁ = (1/8π)[r + ¼|∇J|² + 4R^E(w_j, w̄_j)]`.
    pub const TRACE: &str = "1/8 pi^-1 RX + 1/2 pi^-1 NJ(h0,h1,h2) NJ(a0,a1,a2) + 1 pi^-1 RE(h0,a0)";
    /// `b₀` for `a_j = 2π`: the projector onto `Λ⁰ ⊗ E`.
    pub const LEADING: &str = "1 I";
}

#[derive(Debug, Error)]
pub enum ExpansionError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("step {step} differs\n  expected: {expected}\n  actual:   {actual}\n  actual − expected: {difference}")]
    Mismatch { step: String, expected: String, actual: String, difference: String },
}

/// One checked intermediate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub name: String,
    pub value: String,
    pub expected: String,
    pub matches: bool,
    /// Taken as given rather than computed.
    pub axiom: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub b0: String,
    pub b1: String,
    pub trace_b1: String,
    pub steps: Vec<Step>,
}

impl ExpansionReport {
    pub fn all_match(&self) -> bool {
        self.steps.iter().all(|s| s.matches)
    }

    pub fn step(&self, name: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.name == name)
    }

    /// The first failing step as an error.
    pub fn first_mismatch(&self) -> Option<ExpansionError> {
        self.steps.iter().find(|s| !s.matches).map(|s| {
            let diff = match (s.value.parse::<Expr>(), s.expected.parse::<Expr>()) {
                (Ok(a), Ok(e)) => a.sub(&e).to_string(),
                _ => "unparseable".into(),
            };
            ExpansionError::Mismatch {
                step: s.name.clone(),
                expected: s.expected.clone(),
                actual: s.value.clone(),
                difference: diff,
            }
        })
    }
}

fn parse(text: &str) -> Expr {
    text.parse().expect("built-in expression")
}

struct Recorder<'a> {
    rules: &'a RuleSet,
    steps: Vec<Step>,
}

impl Recorder<'_> {
    /// Records `value` against `expected`; with `modulo` both sides are
    /// first rewritten with the identities.
    fn check(&mut self, name: &str, value: &Expr, expected: &str, modulo: bool) -> Result<(), ExpansionError> {
        let want = parse(expected);
        let matches = if modulo {
            apply_identities(value, self.rules)? == apply_identities(&want, self.rules)?
        } else {
            *value == want
        };
        self.steps.push(Step {
            name: name.into(),
            value: value.to_string(),
            expected: want.to_string(),
            matches,
            axiom: false,
        });
        Ok(())
    }
}

/// Lowest-order coefficient `b₀` for `a_j = 2π`.
pub fn compute_b0() -> Expr {
    parse(expected::LEADING)
}

/// Imported value of the `𝓞₂` contribution.
pub fn lemma_second_order() -> Expr {
    parse(expected::IMPORTED_O2)
}

/// Evaluates the six terms of `F₂` at `(0,0)` with the bundled imported
/// lemma.
pub fn compute_f2(rules: &RuleSet) -> Result<ExpansionReport, ExpansionError> {
    compute_f2_with(rules, &lemma_second_order())
}

/// As [`compute_f2`] with an explicit value for the imported lemma.
pub fn compute_f2_with(rules: &RuleSet, lemma: &Expr) -> Result<ExpansionReport, ExpansionError> {
    use expected as x;
    let mut rec = Recorder { rules, steps: Vec::new() };
    let q1 = build_q1();

    let on_vacuum = apply_to_pn(&q1);
    rec.check("q1-on-vacuum", &on_vacuum.0, x::Q1_ON_VACUUM, false)?;
    let resolved = resolvent(&on_vacuum, true)?;
    rec.check("resolved-q1", &resolved.0, x::RESOLVED_Q1, false)?;
    let left = slice_at_origin(&resolved);
    rec.check("resolved-q1-at-origin-left", &left, x::RESOLVED_AT_ORIGIN_LEFT, false)?;
    let right = slice_at_prime_origin(&resolved);
    rec.check("resolved-q1-at-origin-right", &right, x::RESOLVED_AT_ORIGIN_RIGHT, false)?;
    let adj_left = adjoint_slice(&left);
    rec.check("adjoint-left", &adj_left, x::ADJOINT_LEFT, false)?;
    let adj_right = adjoint_slice(&right);
    rec.check("adjoint-right", &adj_right, x::ADJOINT_RIGHT, false)?;

    // terms 5 and 6
    let outer = integrate_slices(&left, &adj_left);
    rec.check("outer-quadratic", &outer, x::OUTER_QUADRATIC, false)?;
    let inner = integrate_slices(&adj_right, &right).scale(&Coefficient::int(-1));
    rec.check("inner-quadratic", &inner, x::INNER_QUADRATIC, false)?;

    // term 1 and its adjoint, term 3
    let twice = resolvent(&project_perp(&act(&q1, &resolved)), true)?;
    let term1 = eval_origin(&twice);
    rec.check("double-resolvent", &term1, x::DOUBLE_RESOLVENT, false)?;
    let term3 = adjoint(&ModelOperator(term1.clone())).0;

    // term 2 and its adjoint, term 4
    let correction = resolvent(&apply_to_pn(&build_q2_minus_o2()), true)?;
    let correction = eval_origin(&correction).scale(&Coefficient::int(-1));
    rec.check("second-order-correction-raw", &correction, x::SECOND_ORDER_RAW, true)?;
    rec.check("second-order-correction", &correction, x::SECOND_ORDER, true)?;
    rec.steps.push(Step {
        name: "imported-second-order".into(),
        value: lemma.to_string(),
        expected: parse(x::IMPORTED_O2).to_string(),
        matches: true,
        axiom: true,
    });
    let term2 = correction.add(lemma);
    let term4 = adjoint(&ModelOperator(term2.clone())).0;

    let b1 = [&term1, &term2, &term3, &term4, &outer, &inner]
        .into_iter()
        .fold(Expr::zero(), |acc, t| acc.add(t));
    rec.check("coefficient-coordinates", &b1, x::COEFFICIENT_COORDINATES, true)?;
    rec.check("coefficient-unitary", &b1, x::COEFFICIENT_UNITARY, true)?;
    let trace = lambda_trace(&ExtEnd(b1.clone()))?;
    rec.check("trace", &trace, x::TRACE, true)?;

    Ok(ExpansionReport {
        b0: compute_b0().to_string(),
        b1: b1.to_string(),
        trace_b1: trace.to_string(),
        steps: rec.steps,
    })
}
