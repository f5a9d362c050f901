//! Truncated Fock representation of the model Weyl algebra.
//!
//! Each complex direction `j` carries two oscillator modes: the Landau mode
//! `A_j` (with `b_j = √(2|a_j|) A_j†`, `b_j⁺ = √(2|a_j|) A_j`) and the
//! guiding-centre mode `B_j`, which generates the degeneracy `z^β` of each
//! level. Coordinates are `z_j = √(2/|a_j|)(A_j − B_j†)` and
//! `z̄_j = √(2/|a_j|)(A_j† − B_j)`; for `a_j < 0` the roles of `z_j` and `z̄_j`
//! are exchanged. At `a_j = 2π` these reproduce the engine's brackets
//! `[b⁺, b] = 4π`, `[z, b] = [b⁺, z̄] = 2`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NumericError;
use crate::algebra::ModelOperator;
use crate::exterior::{atoms_value, for_each_assignment, letter_matrix, omega_d, AtomValues, ModelParams};
use crate::symbolic::{Expr, GenKind, Head, Letter, Monomial, SlotType};

type C = Complex64;

/// Which oscillator modes span the truncated basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modes {
    /// Only the Landau modes: states `b^α P`, size `C(N+n, n)`.
    Landau,
    /// Landau and guiding-centre modes: states `b^α z^β P`, size `C(N+2n, 2n)`.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockBasisSpec {
    pub n: usize,
    pub cutoff: usize,
    pub include_exterior: bool,
    pub modes: Modes,
}

impl FockBasisSpec {
    pub fn new(n: usize, cutoff: usize, include_exterior: bool, modes: Modes) -> Result<Self, NumericError> {
        if n == 0 {
            return Err(NumericError::InvalidSpec("n must be positive".into()));
        }
        if cutoff == 0 {
            return Err(NumericError::InvalidSpec("cutoff must be at least 1".into()));
        }
        Ok(Self { n, cutoff, include_exterior, modes })
    }

    pub fn mode_count(&self) -> usize {
        match self.modes {
            Modes::Landau => self.n,
            Modes::Full => 2 * self.n,
        }
    }

    pub fn ext_dim(&self) -> usize {
        if self.include_exterior {
            1 << self.n
        } else {
            1
        }
    }

    pub fn boson_dim(&self) -> usize {
        binomial(self.cutoff + self.mode_count(), self.mode_count())
    }

    pub fn dim(&self) -> usize {
        self.boson_dim() * self.ext_dim()
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Occupation-number basis with precomputed ladder transitions.
#[derive(Clone, Debug)]
pub struct FockSpace {
    pub spec: FockBasisSpec,
    pub params: ModelParams,
    pub states: Vec<Vec<u32>>,
    raise: Vec<Vec<Option<usize>>>,
    lower: Vec<Vec<Option<usize>>>,
}

impl FockSpace {
    pub fn new(spec: FockBasisSpec, params: ModelParams) -> Result<Self, NumericError> {
        if params.n() != spec.n {
            return Err(NumericError::InvalidSpec(format!(
                "basis has n = {} but {} eigenvalues a_j were given",
                spec.n,
                params.n()
            )));
        }
        let modes = spec.mode_count();
        let mut states = Vec::with_capacity(spec.boson_dim());
        let mut cur = vec![0u32; modes];
        enumerate(&mut cur, 0, spec.cutoff as u32, &mut states);
        states.sort_by(|x, y| total(x).cmp(&total(y)).then_with(|| y.cmp(x)));
        let index: HashMap<Vec<u32>, usize> =
            states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let step = |s: &[u32], mode: usize, up: bool| -> Option<usize> {
            let mut t = s.to_vec();
            if up {
                t[mode] += 1;
            } else {
                t[mode] = t[mode].checked_sub(1)?;
            }
            index.get(&t).copied()
        };
        let raise = (0..modes).map(|m| states.iter().map(|s| step(s, m, true)).collect()).collect();
        let lower = (0..modes).map(|m| states.iter().map(|s| step(s, m, false)).collect()).collect();
        Ok(Self { spec, params, states, raise, lower })
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn ext_dim(&self) -> usize {
        self.spec.ext_dim()
    }

    pub fn dim(&self) -> usize {
        self.states.len() * self.ext_dim()
    }

    /// Occupations `(α_j, β_j)` of direction `j` in state `s`.
    pub fn occupation(&self, s: usize, j: usize) -> (u32, u32) {
        let st = &self.states[s];
        let beta = match self.spec.modes {
            Modes::Landau => 0,
            Modes::Full => st[self.spec.n + j],
        };
        (st[j], beta)
    }

    pub fn total(&self, s: usize) -> u32 {
        total(&self.states[s])
    }

    /// Landau-level energy `Σ_j 2|a_j| α_j` of a boson state.
    pub fn level_energy(&self, s: usize) -> f64 {
        (0..self.n()).map(|j| 2.0 * self.params.a[j].abs() * f64::from(self.occupation(s, j).0)).sum()
    }

    fn ladder(&self, mode: usize, up: bool, v: &DVector<C>) -> DVector<C> {
        let e = self.ext_dim();
        let mut out = DVector::zeros(v.len());
        let table = if up { &self.raise[mode] } else { &self.lower[mode] };
        for (s, t) in table.iter().enumerate() {
            let Some(t) = *t else { continue };
            let occ = self.states[s][mode];
            let f = if up { f64::from(occ + 1).sqrt() } else { f64::from(occ).sqrt() };
            for x in 0..e {
                out[t * e + x] += v[s * e + x] * f;
            }
        }
        out
    }

    /// Ladder decomposition `Σ coeff · (mode, raise)` of a generator.
    fn gen_terms(&self, kind: GenKind, j: usize) -> Result<Vec<(usize, bool, f64)>, NumericError> {
        let n = self.n();
        let a = self.params.a[j];
        let s = (2.0 * a.abs()).sqrt();
        let t = (2.0 / a.abs()).sqrt();
        let (lm, gm) = (j, n + j);
        let kind = if a < 0.0 {
            match kind {
                GenKind::Z => GenKind::ZBar,
                GenKind::ZBar => GenKind::Z,
                k => k,
            }
        } else {
            kind
        };
        match kind {
            GenKind::B => Ok(vec![(lm, true, s)]),
            GenKind::BPlus => Ok(vec![(lm, false, s)]),
            GenKind::ZPrime | GenKind::ZBarPrime => Err(NumericError::PrimedGenerator(format!("{kind:?}"))),
            _ if self.spec.modes == Modes::Landau => Err(NumericError::Unrepresentable(format!("{kind:?}"))),
            GenKind::Z => Ok(vec![(lm, false, t), (gm, true, -t)]),
            GenKind::ZBar => Ok(vec![(lm, true, t), (gm, false, -t)]),
        }
    }

    /// Truncated action of `kind_j` on a vector.
    pub fn apply_gen(&self, kind: GenKind, j: usize, v: &DVector<C>) -> Result<DVector<C>, NumericError> {
        let mut out = DVector::zeros(v.len());
        for (mode, up, c) in self.gen_terms(kind, j)? {
            out += self.ladder(mode, up, v) * C::new(c, 0.0);
        }
        Ok(out)
    }

    /// Action of an exterior letter on the `Λ(ℂ^n)` factor.
    pub fn apply_letter(&self, letter: Letter, idx: usize, v: &DVector<C>) -> Result<DVector<C>, NumericError> {
        if !self.spec.include_exterior {
            return Err(NumericError::MissingExterior(format!("{letter:?}")));
        }
        let e = self.ext_dim();
        let m = letter_matrix::<C>(self.n(), letter, idx);
        Ok(self.apply_ext_block(&DMatrix::from_row_slice(e, e, &m.data), v))
    }

    fn apply_ext_block(&self, m: &DMatrix<C>, v: &DVector<C>) -> DVector<C> {
        let e = self.ext_dim();
        let mut out = DVector::zeros(v.len());
        for s in 0..self.states.len() {
            let block = m * v.rows(s * e, e);
            out.rows_mut(s * e, e).copy_from(&block);
        }
        out
    }

    /// Applies a normal-ordered expression, summing over label assignments.
    pub fn apply_expr(&self, e: &Expr, values: &dyn AtomValues<C>, v: &DVector<C>) -> Result<DVector<C>, NumericError> {
        let n = self.n();
        let mut out = DVector::zeros(v.len());
        for (m, c) in e.iter() {
            self.check_monomial(m)?;
            let coeff = c.to_complex64();
            let mut err = None;
            for_each_assignment(m, n, |idx| {
                if err.is_some() {
                    return;
                }
                let val = atoms_value(&m.atoms, n, idx, values) * coeff;
                if val.norm() == 0.0 {
                    return;
                }
                let step = |w: DVector<C>| -> Result<DVector<C>, NumericError> {
                    let mut w = w;
                    for g in m.gens.iter().rev() {
                        w = self.apply_gen(g.kind, idx(g.label), &w)?;
                    }
                    for l in m.ext.iter().rev() {
                        w = self.apply_letter(*l, l.label().map(idx).unwrap_or(0), &w)?;
                    }
                    Ok(w)
                };
                match step(v.clone()) {
                    Ok(w) => out += w * val,
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        Ok(out)
    }

    fn check_monomial(&self, m: &Monomial) -> Result<(), NumericError> {
        if let Some(g) = m.gens.iter().find(|g| g.kind.is_prime()) {
            return Err(NumericError::PrimedGenerator(format!("{:?} in {m}", g.kind)));
        }
        if !m.ext.is_empty() && !self.spec.include_exterior {
            return Err(NumericError::MissingExterior(m.to_string()));
        }
        Ok(())
    }

    /// Dense matrix of an expression, built column by column.
    pub fn matrix_of(&self, e: &Expr, values: &dyn AtomValues<C>) -> Result<DMatrix<C>, NumericError> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for c in 0..d {
            let mut v = DVector::zeros(d);
            v[c] = C::new(1.0, 0.0);
            out.set_column(c, &self.apply_expr(e, values, &v)?);
        }
        Ok(out)
    }

    /// `−2ω_d` acting on the exterior factor.
    pub fn minus_two_omega(&self) -> Result<DMatrix<C>, NumericError> {
        if !self.spec.include_exterior {
            return Err(NumericError::MissingExterior("ω_d".into()));
        }
        let w = omega_d(&self.params) * C::new(-2.0, 0.0);
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for c in 0..d {
            let mut v = DVector::zeros(d);
            v[c] = C::new(1.0, 0.0);
            out.set_column(c, &self.apply_ext_block(&w, &v));
        }
        Ok(out)
    }
}

fn total(s: &[u32]) -> u32 {
    s.iter().sum()
}

fn enumerate(cur: &mut Vec<u32>, pos: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
    if pos == cur.len() {
        out.push(cur.clone());
        return;
    }
    for k in 0..=budget {
        cur[pos] = k;
        enumerate(cur, pos + 1, budget - k, out);
    }
    cur[pos] = 0;
}

/// Atom values for expressions that contain no tensor atoms.
pub struct NoAtoms;

impl AtomValues<C> for NoAtoms {
    fn value(&self, head: Head, _slots: &[(SlotType, usize)]) -> C {
        panic!("no numeric value supplied for {head:?}")
    }
}

/// A dense model-operator matrix in the occupation basis.
#[derive(Clone, Debug)]
pub struct FockMatrix {
    pub spec: FockBasisSpec,
    pub params: ModelParams,
    pub matrix: DMatrix<C>,
}

impl FockMatrix {
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Spectral decomposition of the Hermitian part.
    pub fn spectral(&self) -> Spectral {
        Spectral::new(&self.matrix)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectral().eigenvalues()
    }
}

/// One invariant block of a Hermitian matrix: global indices, eigenvalues,
/// and eigenvectors as columns in block coordinates.
#[derive(Clone, Debug)]
pub struct SpectralBlock {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub vectors: DMatrix<C>,
}

/// Eigen-decomposition of `(H + H†)/2`, computed block by block over the
/// connected components of its sparsity pattern.
#[derive(Clone, Debug)]
pub struct Spectral {
    pub dim: usize,
    pub blocks: Vec<SpectralBlock>,
}

impl Spectral {
    pub fn new(h: &DMatrix<C>) -> Self {
        let herm = (h + h.adjoint()) * C::new(0.5, 0.0);
        let blocks = components(&herm)
            .into_iter()
            .map(|indices| {
                let k = indices.len();
                let sub = DMatrix::from_fn(k, k, |r, c| herm[(indices[r], indices[c])]);
                let eig = sub.symmetric_eigen();
                SpectralBlock { indices, values: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors }
            })
            .collect();
        Self { dim: h.nrows(), blocks }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.blocks.iter().flat_map(|b| b.values.iter().copied()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Eigenpairs `(λ, v)` with `v` as a full-length vector, ascending in `λ`.
    pub fn pairs(&self) -> Vec<(f64, DVector<C>)> {
        let mut out = Vec::new();
        for b in &self.blocks {
            for (i, lam) in b.values.iter().enumerate() {
                let mut v = DVector::zeros(self.dim);
                for (r, &g) in b.indices.iter().enumerate() {
                    v[g] = b.vectors[(r, i)];
                }
                out.push((*lam, v));
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }

    /// `f(H)` as a dense matrix.
    pub fn function(&self, f: impl Fn(f64) -> f64) -> DMatrix<C> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let scaled = DMatrix::from_fn(b.vectors.nrows(), b.vectors.ncols(), |r, c| b.vectors[(r, c)] * f(b.values[c]));
            let sub = scaled * b.vectors.adjoint();
            for (r, &gr) in b.indices.iter().enumerate() {
                for (c, &gc) in b.indices.iter().enumerate() {
                    out[(gr, gc)] = sub[(r, c)];
                }
            }
        }
        out
    }
}

fn components(h: &DMatrix<C>) -> Vec<Vec<usize>> {
    let d = h.nrows();
    let mut seen = vec![false; d];
    let mut out = Vec::new();
    for start in 0..d {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut block = vec![start];
        let mut i = 0;
        while i < block.len() {
            let r = block[i];
            for c in 0..d {
                if !seen[c] && (h[(r, c)].norm() != 0.0 || h[(c, r)].norm() != 0.0) {
                    seen[c] = true;
                    block.push(c);
                }
            }
            i += 1;
        }
        block.sort_unstable();
        out.push(block);
    }
    out
}

/// Matrix of a model operator with numeric atom values.
pub fn fock_matrix(
    op: &ModelOperator,
    spec: &FockBasisSpec,
    params: &ModelParams,
    values: &dyn AtomValues<C>,
) -> Result<FockMatrix, NumericError> {
    let space = FockSpace::new(spec.clone(), params.clone())?;
    let matrix = space.matrix_of(&op.0, values)?;
    Ok(FockMatrix { spec: spec.clone(), params: params.clone(), matrix })
}

/// `𝓛₀ = Σ_j b_j b_j⁺` for general `a_j`.
pub fn l0_matrix(spec: &FockBasisSpec, params: &ModelParams) -> Result<FockMatrix, NumericError> {
    let op = ModelOperator::parse("1 b0 bp0").expect("static operator");
    fock_matrix(&op, spec, params, &NoAtoms)
}

/// `L⁰₂ = 𝓛₀ − 2ω_d`.
pub fn l02_matrix(spec: &FockBasisSpec, params: &ModelParams) -> Result<FockMatrix, NumericError> {
    let mut m = l0_matrix(spec, params)?;
    let space = FockSpace::new(spec.clone(), params.clone())?;
    m.matrix += space.minus_two_omega()?;
    Ok(m)
}

/// Lowest eigenvalues flagged when they move by more than `tol` between
/// `cutoff` and `cutoff + 10`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationWarning {
    pub cutoff: usize,
    pub deviation: f64,
    pub tolerance: f64,
}

pub fn low_spectrum(
    op: &ModelOperator,
    spec: &FockBasisSpec,
    params: &ModelParams,
    values: &dyn AtomValues<C>,
    count: usize,
    tol: f64,
) -> Result<(Vec<f64>, Option<TruncationWarning>), NumericError> {
    let base = fock_matrix(op, spec, params, values)?.eigenvalues();
    let wider = FockBasisSpec { cutoff: spec.cutoff + 10, ..spec.clone() };
    let more = fock_matrix(op, &wider, params, values)?.eigenvalues();
    let k = count.min(base.len());
    let deviation = base.iter().zip(&more).take(k).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let warning = (deviation > tol).then_some(TruncationWarning { cutoff: spec.cutoff, deviation, tolerance: tol });
    Ok((base[..k].to_vec(), warning))
}

/// Distinct eigenvalues with multiplicities, grouping values within `tol`.
pub fn clusters(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some((c, k)) if (v - *c).abs() <= tol => *k += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

/// Number of truncated basis states (boson ⊗ exterior) whose `𝓛₀` energy
/// equals `energy`, counted combinatorially.
pub fn level_count(space: &FockSpace, energy: f64, tol: f64) -> usize {
    (0..space.states.len()).filter(|&s| (space.level_energy(s) - energy).abs() <= tol).count() * space.ext_dim()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::expansion::build_l02;

    fn spec(n: usize, cutoff: usize, ext: bool, modes: Modes) -> FockBasisSpec {
        FockBasisSpec::new(n, cutoff, ext, modes).unwrap()
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(spec(1, 40, false, Modes::Landau).dim(), 41);
        assert_eq!(spec(2, 20, false, Modes::Landau).dim(), 231);
        assert_eq!(spec(2, 3, true, Modes::Full).dim(), 35 * 4);
        let space = FockSpace::new(spec(2, 3, true, Modes::Full), ModelParams::standard(2)).unwrap();
        assert_eq!(space.dim(), 140);
        assert!(FockBasisSpec::new(1, 0, false, Modes::Full).is_err());
    }

    #[test]
    fn l0_spectrum_n1() {
        let m = l0_matrix(&spec(1, 40, false, Modes::Landau), &ModelParams::standard(1)).unwrap();
        let ev = m.eigenvalues();
        for (k, v) in ev.iter().take(10).enumerate() {
            assert!((v - 4.0 * PI * k as f64).abs() < 1e-8, "{k}: {v}");
        }
    }

    #[test]
    fn brackets_hold_on_low_modes() {
        let space = FockSpace::new(spec(1, 12, false, Modes::Full), ModelParams::standard(1)).unwrap();
        let low: Vec<usize> = (0..space.dim()).filter(|&s| space.total(s) <= 10).collect();
        let cases = [
            (GenKind::BPlus, GenKind::B, C::new(4.0 * PI, 0.0)),
            (GenKind::Z, GenKind::B, C::new(2.0, 0.0)),
            (GenKind::BPlus, GenKind::ZBar, C::new(2.0, 0.0)),
            (GenKind::Z, GenKind::ZBar, C::new(0.0, 0.0)),
            (GenKind::Z, GenKind::BPlus, C::new(0.0, 0.0)),
        ];
        for (x, y, expected) in cases {
            for &s in &low {
                let mut v = DVector::zeros(space.dim());
                v[s] = C::new(1.0, 0.0);
                let xy = space.apply_gen(x, 0, &space.apply_gen(y, 0, &v).unwrap()).unwrap();
                let yx = space.apply_gen(y, 0, &space.apply_gen(x, 0, &v).unwrap()).unwrap();
                let dev = (xy - yx - v * expected).norm();
                assert!(dev < 1e-12, "[{x:?},{y:?}] on {s}: {dev}");
            }
        }
    }

    #[test]
    fn multiplicity_matches_combinatorial_count() {
        for (cutoff, modes) in [(20, Modes::Landau), (8, Modes::Full)] {
            let params = ModelParams::standard(2);
            let s = spec(2, cutoff, false, modes);
            let space = FockSpace::new(s.clone(), params.clone()).unwrap();
            let ev = l0_matrix(&s, &params).unwrap().eigenvalues();
            let dense = ev.iter().filter(|v| (*v - 12.0 * PI).abs() < 1e-8).count();
            assert_eq!(dense, level_count(&space, 12.0 * PI, 1e-8));
            let below = ev.iter().filter(|v| **v < 14.0 * PI).count();
            let expected: usize = (0..4).map(|k| level_count(&space, 4.0 * PI * k as f64, 1e-8)).sum();
            assert_eq!(below, expected);
        }
        let landau = FockSpace::new(spec(2, 20, false, Modes::Landau), ModelParams::standard(2)).unwrap();
        assert_eq!(level_count(&landau, 12.0 * PI, 1e-8), 4);
    }

    #[test]
    fn l02_ground_space_is_vacuum_line() {
        let s = spec(1, 10, true, Modes::Landau);
        let params = ModelParams::standard(1);
        let m = l02_matrix(&s, &params).unwrap();
        let pairs = m.spectral().pairs();
        assert!(pairs[0].0.abs() < 1e-10 && pairs[1].0 > 1.0);
        assert!((pairs[0].1[0].norm() - 1.0).abs() < 1e-12);
        let symbolic = fock_matrix(&build_l02(), &s, &params, &NoAtoms).unwrap();
        assert!((&symbolic.matrix - &m.matrix).norm() < 1e-10);
        assert!(symbolic.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn coordinates_unavailable_in_landau_basis() {
        let space = FockSpace::new(spec(1, 4, false, Modes::Landau), ModelParams::standard(1)).unwrap();
        let v = DVector::zeros(space.dim());
        assert!(matches!(space.apply_gen(GenKind::Z, 0, &v), Err(NumericError::Unrepresentable(_))));
        assert!(matches!(space.apply_gen(GenKind::ZPrime, 0, &v), Err(NumericError::PrimedGenerator(_))));
        assert!(space.apply_letter(Letter::C(0), 0, &v).is_err());
    }

    #[test]
    fn truncation_warning_for_unconverged_observable() {
        let s = spec(1, 4, false, Modes::Full);
        let params = ModelParams::standard(1);
        let l0 = ModelOperator::parse("1 b0 bp0").unwrap();
        let (_, w) = low_spectrum(&l0, &s, &params, &NoAtoms, 5, 1e-8).unwrap();
        assert!(w.is_none());
        // z z̄ has continuous spectrum; truncation moves its low eigenvalues
        let r2 = ModelOperator::parse("1 z0 zb0").unwrap();
        let (_, w) = low_spectrum(&r2, &s, &params, &NoAtoms, 5, 1e-8).unwrap();
        assert!(w.is_some());
    }
}
