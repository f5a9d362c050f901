//! Endomorphisms of `Λ(T^{*(0,1)})` at a point: creation/annihilation words,
//! the vacuum projector, Clifford multiplication, `ω_d`, and the Λ-trace.
//!
//! Words are written in the coordinate basis: `C(l) = dz̄_l ∧` and
//! `A(l) = i_{∂/∂z̄_l}`, which satisfy `{A(m), C(l)} = δ_lm` exactly. With the
//! unit vectors `w_j = √2 ∂/∂z_j` and dual coframe `w̄^j`, one has
//! `dz̄_j = √2 w̄^j` and `i_{∂/∂z̄_j} = i_{w̄_j}/√2`, so Clifford actions carry
//! no surds: `c(w_j) = C(j)` and `c(w̄_j) = −2 A(j)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficient::Coefficient;
use crate::scalar::{Matrix, Scalar};
use crate::symbolic::{Expr, Head, Label, Letter, Monomial, Slot, SlotType};

#[derive(Debug, Error, PartialEq)]
pub enum ExteriorError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("trace of a word without the vacuum projector depends on 2^n: {0}")]
    UnsupportedTrace(String),
    #[error("expression still contains Weyl generators: {0}")]
    NotExterior(String),
}

/// An `End(Λ)`-valued tensor expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtEnd(pub Expr);

pub fn ext_multiply(a: &ExtEnd, b: &ExtEnd) -> ExtEnd {
    ExtEnd(a.0.mul(&b.0))
}

/// Unit vectors of `T^{(1,0)} ⊕ T^{(0,1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitVector {
    W(Label),
    WBar(Label),
}

fn clifford_letter(v: UnitVector) -> (Coefficient, Letter) {
    match v {
        UnitVector::W(l) => (Coefficient::one(), Letter::C(l)),
        UnitVector::WBar(l) => (Coefficient::int(-2), Letter::A(l)),
    }
}

/// `c(u) c(v)` as an exterior word.
pub fn clifford_expand(u: UnitVector, v: UnitVector) -> ExtEnd {
    let (cu, lu) = clifford_letter(u);
    let (cv, lv) = clifford_letter(v);
    ExtEnd(Expr::from_monomial(&cu * &cv, Monomial::from_parts(vec![], vec![lu, lv], vec![])))
}

fn with_types(m: &Monomial, fixes: &[(Label, SlotType)]) -> Monomial {
    let mut out = m.clone();
    for at in &mut out.atoms {
        for s in &mut at.slots {
            if let Some((_, t)) = fixes.iter().find(|(l, _)| *l == s.label) {
                s.ty = *t;
            }
        }
    }
    out
}

/// `Σ_{l,m} T(e_l, e_m) c(e_l) c(e_m)` over a real orthonormal frame, where
/// `template` lists the raw terms of `T` with the two vector arguments in
/// slots labelled `j`, `k` (raw, since those labels are placeholders).
pub fn clifford_quadratic(template: &[(Coefficient, Monomial)], j: Label, k: Label) -> Expr {
    use SlotType::{Anti, Hol};
    // (type of e_l slot, type of e_m slot, coefficient, letters)
    let cases: [(SlotType, SlotType, i64, [Letter; 2]); 4] = [
        (Hol, Hol, 8, [Letter::A(j), Letter::A(k)]),
        (Anti, Anti, 2, [Letter::C(j), Letter::C(k)]),
        (Hol, Anti, -4, [Letter::A(j), Letter::C(k)]),
        (Anti, Hol, -4, [Letter::C(j), Letter::A(k)]),
    ];
    let mut raw = Vec::new();
    for (c, m) in template {
        for (tj, tk, f, letters) in &cases {
            let mut mm = with_types(m, &[(j, *tj), (k, *tk)]);
            let mut ext = letters.to_vec();
            ext.append(&mut mm.ext);
            mm.ext = ext;
            raw.push((c * &Coefficient::int(*f), mm));
        }
    }
    Expr::collect(raw)
}

/// `Σ_i T(e_i, e_i) = 2 Σ_j [T(∂z_j, ∂z̄_j) + T(∂z̄_j, ∂z_j)]`, with the two
/// arguments marked by labels `j`, `k` in the raw `template`.
pub fn frame_trace(template: &[(Coefficient, Monomial)], j: Label, k: Label) -> Expr {
    let mut raw = Vec::new();
    for (c, m) in template {
        for (tj, tk) in [(SlotType::Hol, SlotType::Anti), (SlotType::Anti, SlotType::Hol)] {
            let mut mm = with_types(m, &[(j, tj), (k, tk)]);
            mm.for_each_label_mut(|l| {
                if *l == k {
                    *l = j;
                }
            });
            raw.push((c * &Coefficient::int(2), mm));
        }
    }
    Expr::collect(raw)
}

/// Model parameters: the eigenvalues `a_j` of `R^L` at the point, with
/// `R^L(w_j, w̄_k) = a_j δ_jk`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub a: Vec<f64>,
}

impl ModelParams {
    pub fn new(a: Vec<f64>) -> Result<Self, ExteriorError> {
        if a.is_empty() {
            return Err(ExteriorError::InvalidParams("empty a-list".into()));
        }
        if let Some(x) = a.iter().find(|x| **x == 0.0 || !x.is_finite()) {
            return Err(ExteriorError::InvalidParams(format!("a_j = {x} is not allowed")));
        }
        Ok(Self { a })
    }

    /// The almost-Kähler specialization `a_j = 2π`.
    pub fn standard(n: usize) -> Self {
        Self { a: vec![2.0 * std::f64::consts::PI; n] }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.a.iter().filter(|x| **x < 0.0).count()
    }

    pub fn tau(&self) -> f64 {
        self.a.iter().map(|x| x.abs()).sum()
    }

    pub fn mu0(&self) -> f64 {
        self.a.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min)
    }

    /// `det_ℂ |J|` with `|J|` having eigenvalues `|a_j| / 2π`.
    pub fn det_abs_j(&self) -> f64 {
        self.a.iter().map(|x| x.abs() / (2.0 * std::f64::consts::PI)).product()
    }

    /// Bit mask of the exterior basis vector spanning `det(W̄*)`.
    pub fn kernel_mask(&self) -> usize {
        self.a
            .iter()
            .enumerate()
            .filter(|(_, x)| **x < 0.0)
            .fold(0, |m, (j, _)| m | (1 << j))
    }
}

/// `ω_d = −Σ_j a_j w̄^j ∧ i_{w̄_j} + Σ_{a_j<0} a_j`, diagonal in the basis
/// `w̄^S`, `S ⊂ {1..n}` indexed by bit masks.
pub fn omega_d(params: &ModelParams) -> DMatrix<Complex64> {
    let n = params.n();
    let shift: f64 = params.a.iter().filter(|x| **x < 0.0).sum();
    DMatrix::from_fn(1 << n, 1 << n, |r, c| {
        if r != c {
            return Complex64::new(0.0, 0.0);
        }
        let occ: f64 = (0..n).filter(|j| r & (1 << j) != 0).map(|j| params.a[j]).sum();
        Complex64::new(shift - occ, 0.0)
    })
}

/// The projector onto `det(W̄*)` scaled by `det_ℂ|J|`: the leading
/// coefficient of the diagonal expansion.
pub fn b0_matrix(params: &ModelParams) -> DMatrix<Complex64> {
    let d = 1 << params.n();
    let k = params.kernel_mask();
    DMatrix::from_fn(d, d, |r, c| {
        if r == k && c == k {
            Complex64::new(params.det_abs_j(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn sign_below(mask: usize, l: usize) -> i64 {
    if (mask & ((1 << l) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `dz̄_l ∧` on `Λ(ℂ^n)` in the basis `dz̄_S` (bit masks, increasing order).
pub fn creation_matrix<S: Scalar>(n: usize, l: usize) -> Matrix<S> {
    let mut m = Matrix::zeros(1 << n);
    for s in 0..(1usize << n) {
        if s & (1 << l) == 0 {
            m.set(s | (1 << l), s, S::from_int(sign_below(s, l)));
        }
    }
    m
}

/// `i_{∂/∂z̄_l}` on `Λ(ℂ^n)`.
pub fn annihilation_matrix<S: Scalar>(n: usize, l: usize) -> Matrix<S> {
    let mut m = Matrix::zeros(1 << n);
    for s in 0..(1usize << n) {
        if s & (1 << l) != 0 {
            m.set(s & !(1 << l), s, S::from_int(sign_below(s, l)));
        }
    }
    m
}

pub fn vacuum_projector<S: Scalar>(n: usize) -> Matrix<S> {
    let mut m = Matrix::zeros(1 << n);
    m.set(0, 0, S::one());
    m
}

pub fn letter_matrix<S: Scalar>(n: usize, letter: Letter, idx: usize) -> Matrix<S> {
    match letter {
        Letter::C(_) => creation_matrix(n, idx),
        Letter::A(_) => annihilation_matrix(n, idx),
        Letter::I => vacuum_projector(n),
    }
}

/// Values of tensor atoms for concrete indices; indices are zero based.
pub trait AtomValues<S> {
    fn value(&self, head: Head, slots: &[(SlotType, usize)]) -> S;
}

/// Sum over all assignments of the labels of `m` to `0..n`.
pub fn for_each_assignment(m: &Monomial, n: usize, mut f: impl FnMut(&dyn Fn(Label) -> usize)) {
    let mut labels = m.labels();
    labels.sort_unstable();
    labels.dedup();
    let k = labels.len();
    let total = n.pow(k as u32);
    for code in 0..total {
        let mut digits = vec![0usize; k];
        let mut c = code;
        for d in digits.iter_mut() {
            *d = c % n;
            c /= n;
        }
        let lookup = |l: Label| digits[labels.binary_search(&l).expect("label")];
        f(&lookup);
    }
}

/// Scalar value of the atom product for a label assignment.
pub fn atoms_value<S: Scalar>(
    atoms: &[crate::symbolic::Atom],
    n: usize,
    idx: &dyn Fn(Label) -> usize,
    values: &dyn AtomValues<S>,
) -> S {
    let mut acc = S::one();
    for at in atoms {
        let v = match at.head {
            Head::Dim => S::from_int(n as i64),
            Head::Pin(k) => {
                if idx(at.slots[0].label) + 1 == k as usize {
                    S::one()
                } else {
                    S::zero()
                }
            }
            head => {
                let slots: Vec<(SlotType, usize)> =
                    at.slots.iter().map(|s: &Slot| (s.ty, idx(s.label))).collect();
                values.value(head, &slots)
            }
        };
        if v.is_zero() {
            return S::zero();
        }
        acc = acc.mul(&v);
    }
    acc
}

/// Explicit `2^n × 2^n` matrix of an `End(Λ)`-valued expression.
pub fn evaluate_ext<S: Scalar>(
    e: &Expr,
    n: usize,
    values: &dyn AtomValues<S>,
) -> Result<Matrix<S>, ExteriorError> {
    let mut out = Matrix::zeros(1 << n);
    for (m, c) in e.iter() {
        if !m.gens.is_empty() {
            return Err(ExteriorError::NotExterior(m.to_string()));
        }
        let coeff = S::from_coeff(c);
        for_each_assignment(m, n, |idx| {
            let v = atoms_value(&m.atoms, n, idx, values);
            if v.is_zero() {
                return;
            }
            let mut word = Matrix::identity(1 << n);
            for l in &m.ext {
                let i = l.label().map(idx).unwrap_or(0);
                word = word.matmul(&letter_matrix(n, *l, i));
            }
            out = out.add(&word.scale(&v.mul(&coeff)));
        });
    }
    Ok(out)
}

/// Trace over `Λ(ℂ^n)` of a combination of words `C… I A…`:
/// `tr(C I A) = ⟨0| A C |0⟩`.
pub fn lambda_trace(e: &ExtEnd) -> Result<Expr, ExteriorError> {
    let mut raw = Vec::new();
    for (m, c) in e.0.iter() {
        let Some(p) = m.ext.iter().position(|l| *l == Letter::I) else {
            if m.ext.is_empty() {
                return Err(ExteriorError::UnsupportedTrace(m.to_string()));
            }
            return Err(ExteriorError::UnsupportedTrace(m.to_string()));
        };
        let mut mm = m.clone();
        let mut word = vec![Letter::I];
        word.extend_from_slice(&m.ext[p + 1..]);
        word.extend_from_slice(&m.ext[..p]);
        word.push(Letter::I);
        mm.ext = word;
        raw.push((c.clone(), mm));
    }
    // after normalization only bare `I` survives; drop it
    let normalized = Expr::collect(raw);
    Ok(normalized.map_terms(|c, m| {
        let mut mm = m.clone();
        if mm.ext == [Letter::I] {
            mm.ext.clear();
            vec![(c.clone(), mm)]
        } else {
            vec![]
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{h, Atom};

    struct NoAtoms;
    impl AtomValues<Coefficient> for NoAtoms {
        fn value(&self, _: Head, _: &[(SlotType, usize)]) -> Coefficient {
            Coefficient::zero()
        }
    }

    #[test]
    fn car_relations_as_matrices() {
        for n in 1..=4 {
            for l in 0..n {
                for m in 0..n {
                    let c: Matrix<Coefficient> = creation_matrix(n, l);
                    let am: Matrix<Coefficient> = annihilation_matrix(n, m);
                    let anti = c.matmul(&am).add(&am.matmul(&c));
                    let expect = if l == m { Matrix::identity(1 << n) } else { Matrix::zeros(1 << n) };
                    assert_eq!(anti.data, expect.data);
                    let c2: Matrix<Coefficient> = creation_matrix(n, m);
                    let cc = c.matmul(&c2).add(&c2.matmul(&c));
                    assert!(cc.data.iter().all(Coefficient::is_zero));
                }
            }
        }
    }

    #[test]
    fn clifford_basics() {
        assert_eq!(
            clifford_expand(UnitVector::W(0), UnitVector::W(1)).0,
            "1 C0 C1".parse().unwrap()
        );
        assert_eq!(
            clifford_expand(UnitVector::W(0), UnitVector::WBar(1)).0,
            "-2 C0 A1".parse().unwrap()
        );
    }

    #[test]
    fn projector_products() {
        let i: ExtEnd = ExtEnd("1 I".parse().unwrap());
        let ci: ExtEnd = ExtEnd("1 C0 I".parse().unwrap());
        assert!(ext_multiply(&i, &ci).0.is_zero());
    }

    #[test]
    fn lambda_trace_matches_matrices() {
        let words = ["1 I", "1 C0 C1 I A2 A3", "1 C0 I A0", "1 C0 I A1", "1 C0 C1 I A1 A0"];
        for w in words {
            let e: Expr = w.parse().unwrap();
            let t = lambda_trace(&ExtEnd(e.clone())).unwrap();
            for n in 2..=3 {
                let m = evaluate_ext::<Coefficient>(&e, n, &NoAtoms).unwrap();
                let tm = evaluate_ext::<Coefficient>(&t, n, &NoAtoms).unwrap();
                assert_eq!(m.trace(), *tm.get(0, 0), "{w} n={n}");
            }
        }
        let t = lambda_trace(&ExtEnd("1 C0 C1 I A1 A0".parse().unwrap())).unwrap();
        assert_eq!(t, "1 DIM DIM + -1 DIM".parse().unwrap());
    }

    #[test]
    fn omega_d_spectrum() {
        let p = ModelParams::new(vec![-2.0 * std::f64::consts::PI, 4.0 * std::f64::consts::PI]).unwrap();
        assert!((p.tau() - 6.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((p.mu0() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let w = omega_d(&p);
        for s in 0..4 {
            let v = w[(s, s)].re;
            if s == p.kernel_mask() {
                assert!(v.abs() < 1e-12);
            } else {
                assert!(v <= -p.mu0() + 1e-12);
            }
        }
        assert!(ModelParams::new(vec![0.0]).is_err());
    }

    struct Table;
    impl AtomValues<Coefficient> for Table {
        fn value(&self, head: Head, slots: &[(SlotType, usize)]) -> Coefficient {
            assert_eq!(head, Head::Re);
            let code = |(t, i): (SlotType, usize)| (i * 2 + (t == SlotType::Anti) as usize) as i64;
            let f = |x: i64, y: i64| Coefficient::new((x * 7 - y * 3 + 1, 5), (x * y * y - 2, 3), 0);
            let (x, y) = (code(slots[0]), code(slots[1]));
            &f(x, y) - &f(y, x)
        }
    }

    /// `√2 c(e_l)` for the real frame `e_{2j} = ∂z_j + ∂z̄_j`,
    /// `e_{2j+1} = i(∂z_j − ∂z̄_j)`.
    fn scaled_clifford(n: usize, l: usize) -> Matrix<Coefficient> {
        let j = l / 2;
        let c = creation_matrix::<Coefficient>(n, j);
        let a2 = annihilation_matrix::<Coefficient>(n, j).scale(&Coefficient::int(2));
        if l.is_multiple_of(2) {
            c.add(&a2.scale(&Coefficient::int(-1)))
        } else {
            c.add(&a2).scale(&Coefficient::i())
        }
    }

    fn frame_components(l: usize) -> Vec<(SlotType, usize, Coefficient)> {
        let j = l / 2;
        if l.is_multiple_of(2) {
            vec![(SlotType::Hol, j, Coefficient::one()), (SlotType::Anti, j, Coefficient::one())]
        } else {
            vec![(SlotType::Hol, j, Coefficient::i()), (SlotType::Anti, j, -Coefficient::i())]
        }
    }

    #[test]
    fn clifford_quadratic_matches_real_frame() {
        let n = 2;
        let t = vec![(
            Coefficient::one(),
            Monomial::from_parts(vec![Atom::re(h(0), h(1))], vec![], vec![]),
        )];
        let q = clifford_quadratic(&t, 0, 1);
        let got = evaluate_ext(&q, n, &Table).unwrap();
        let mut want = Matrix::<Coefficient>::zeros(1 << n);
        for l in 0..2 * n {
            for m in 0..2 * n {
                let mut tv = Coefficient::zero();
                for (t1, i1, c1) in frame_components(l) {
                    for (t2, i2, c2) in frame_components(m) {
                        tv += &(&(&c1 * &c2) * &Table.value(Head::Re, &[(t1, i1), (t2, i2)]));
                    }
                }
                let cc = scaled_clifford(n, l).matmul(&scaled_clifford(n, m));
                want = want.add(&cc.scale(&(&tv * &Coefficient::ratio(1, 2))));
            }
        }
        assert_eq!(got.data, want.data);
    }
}
