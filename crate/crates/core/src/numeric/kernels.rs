//! Closed-form model kernels and their numerical cross-checks.
//!
//! Real coordinates are `Z = (x₀, y₀, x₁, y₁, …)` with `z_j = x_j + i y_j`,
//! so `Σ|z_j|² = |Z|²`. Position-space basis functions are complex Hermite
//! functions `ĥ_{α,β}(w_j)` in `w_j = √(|a_j|/2)·z̄_j` (`z_j` when `a_j < 0`).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fock::{l02_matrix, l0_matrix, FockBasisSpec, FockMatrix, FockSpace, Modes, Spectral};
use super::quadrature::integrate_gaussian;
use super::NumericError;
use crate::exterior::{b0_matrix, omega_d, ModelParams};

type C = Complex64;

/// A uniform grid on `[−extent, extent]^{2n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub extent: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(n: usize, extent: f64, points: usize) -> Result<Self, NumericError> {
        if n == 0 || points == 0 || extent.is_nan() || extent <= 0.0 {
            return Err(NumericError::InvalidSpec(format!("grid n={n}, extent={extent}, points={points}")));
        }
        Ok(Self { n, extent, points })
    }

    pub fn coordinates(&self) -> Vec<Vec<f64>> {
        let axis: Vec<f64> = if self.points == 1 {
            vec![0.0]
        } else {
            (0..self.points)
                .map(|i| -self.extent + 2.0 * self.extent * i as f64 / (self.points - 1) as f64)
                .collect()
        };
        let d = 2 * self.n;
        let total = self.points.pow(d as u32);
        (0..total)
            .map(|mut code| {
                (0..d)
                    .map(|_| {
                        let x = axis[code % self.points];
                        code /= self.points;
                        x
                    })
                    .collect()
            })
            .collect()
    }
}

fn complex(z: &[f64], j: usize) -> C {
    C::new(z[2 * j], z[2 * j + 1])
}

/// Closed-form Bergman kernel of `L⁰₂,ℂ`: the scalar factor and the
/// projector onto `det(W̄*)` that multiplies it in the twisted kernel.
pub fn bergman_kernel_closed(params: &ModelParams, z: &[f64], zp: &[f64]) -> (C, DMatrix<C>) {
    let mut expo = C::new(0.0, 0.0);
    for (j, &a) in params.a.iter().enumerate() {
        let (u, v) = (complex(z, j), complex(zp, j));
        expo += C::new(-a.abs() / 4.0 * (u - v).norm_sqr(), -a / 2.0 * (u.conj() * v).im);
    }
    let proj = b0_matrix(params) / C::new(params.det_abs_j(), 0.0);
    (expo.exp() * params.det_abs_j(), proj)
}

/// Closed-form heat kernel `e^{−u L⁰₂,ℂ}(Z, Z′)`.
pub fn mehler_kernel_closed(params: &ModelParams, u: f64, z: &[f64], zp: &[f64]) -> C {
    let mut value = C::new(1.0, 0.0);
    for (j, &a) in params.a.iter().enumerate() {
        let m = a.abs();
        let lambda = m / (2.0 * std::f64::consts::PI);
        let coth = 1.0 / (m * u).tanh();
        let (x, y) = (complex(z, j), complex(zp, j));
        let cross = x.conj() * y;
        let expo = C::new(
            -m / 4.0 * coth * (x.norm_sqr() + y.norm_sqr()) + m / 2.0 * coth * cross.re,
            -a.signum() * m / 2.0 * cross.im,
        );
        value *= expo.exp() * (lambda / -(-2.0 * m * u).exp_m1());
    }
    value
}

/// `e^{−u L⁰₂}(Z, Z′) = e^{−u L⁰₂,ℂ}(Z, Z′)·e^{2uω_d}`.
pub fn mehler_kernel_twisted(params: &ModelParams, u: f64, z: &[f64], zp: &[f64]) -> DMatrix<C> {
    let scalar = mehler_kernel_closed(params, u, z, zp);
    omega_d(params).map_with_location(|r, c, w| {
        if r == c {
            scalar * (2.0 * u * w).exp()
        } else {
            C::new(0.0, 0.0)
        }
    })
}

/// Normalized `ĥ_{p,q}(w)·e^{−|w|²/2}` for `p ≤ pmax`, `q ≤ qmax`.
fn hermite_table(w: C, pmax: usize, qmax: usize) -> Vec<Vec<C>> {
    let mut t = vec![vec![C::new(0.0, 0.0); qmax + 1]; pmax + 1];
    t[0][0] = C::new((-w.norm_sqr() / 2.0).exp(), 0.0);
    for q in 0..qmax {
        t[0][q + 1] = w.conj() * t[0][q] / ((q + 1) as f64).sqrt();
    }
    for p in 0..pmax {
        for q in 0..=qmax {
            let mut v = w * t[p][q];
            if q > 0 {
                v -= t[p][q - 1] * (q as f64).sqrt();
            }
            t[p + 1][q] = v / ((p + 1) as f64).sqrt();
        }
    }
    t
}

/// Values of the orthonormal boson basis functions at `Z`.
pub fn wavefunctions(space: &FockSpace, z: &[f64]) -> Vec<C> {
    let n = space.n();
    let cutoff = space.spec.cutoff;
    let qmax = if space.spec.modes == Modes::Full { cutoff } else { 0 };
    let tables: Vec<Vec<Vec<C>>> = (0..n)
        .map(|j| {
            let a = space.params.a[j];
            let zj = complex(z, j);
            let w = (if a > 0.0 { zj.conj() } else { zj }) * (a.abs() / 2.0).sqrt();
            hermite_table(w, cutoff, qmax)
        })
        .collect();
    (0..space.states.len())
        .map(|s| {
            (0..n).fold(C::new(1.0, 0.0), |acc, j| {
                let (alpha, beta) = space.occupation(s, j);
                let norm = (space.params.a[j].abs() / (2.0 * std::f64::consts::PI)).sqrt();
                let sign = if beta % 2 == 0 { 1.0 } else { -1.0 };
                acc * tables[j][alpha as usize][beta as usize] * (norm * sign)
            })
        })
        .collect()
}

/// Position kernel `Σ_k f(λ_k) φ_k(Z) φ_k(Z′)*` of a function of a Fock
/// matrix, as an `End(Λ)` block (1×1 without the exterior factor).
pub fn position_kernel(space: &FockSpace, spectral: &Spectral, f: impl Fn(f64) -> f64, z: &[f64], zp: &[f64]) -> DMatrix<C> {
    let e = space.ext_dim();
    let psi = wavefunctions(space, z);
    let psip = if z == zp { psi.clone() } else { wavefunctions(space, zp) };
    let mut out = DMatrix::zeros(e, e);
    for b in &spectral.blocks {
        for (k, &lam) in b.values.iter().enumerate() {
            let weight = f(lam);
            if weight == 0.0 {
                continue;
            }
            let mut phi = DVector::<C>::zeros(e);
            let mut phip = DVector::<C>::zeros(e);
            for (r, &g) in b.indices.iter().enumerate() {
                let (s, x) = (g / e, g % e);
                phi[x] += b.vectors[(r, k)] * psi[s];
                phip[x] += b.vectors[(r, k)] * psip[s];
            }
            out += phi * phip.adjoint() * C::new(weight, 0.0);
        }
    }
    out
}

/// Pointwise and idempotence defects of the numerically assembled
/// spectral projector of `L⁰₂,ℂ` against the closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorCheck {
    pub pointwise: f64,
    pub idempotence: f64,
}

pub fn projector_vs_closed(params: &ModelParams, cutoff: usize, grid: &GridSpec) -> Result<ProjectorCheck, NumericError> {
    let spec = FockBasisSpec::new(params.n(), cutoff, false, Modes::Full)?;
    let space = FockSpace::new(spec.clone(), params.clone())?;
    let spectral = l0_matrix(&spec, params)?.spectral();
    let gap = params.mu0();
    let ground = |lam: f64| if lam.abs() < gap { 1.0 } else { 0.0 };
    let p = spectral.function(ground);
    let idempotence = (&p * &p - &p).iter().map(|x| x.norm()).fold(0.0, f64::max);
    let pts = grid.coordinates();
    let mut pointwise: f64 = 0.0;
    for z in &pts {
        for zp in &pts {
            let num = position_kernel(&space, &spectral, ground, z, zp)[(0, 0)];
            pointwise = pointwise.max((num - bergman_kernel_closed(params, z, zp).0).norm());
        }
    }
    Ok(ProjectorCheck { pointwise, idempotence })
}

/// Cutoff at which the discarded Landau levels weigh less than `e^{−20}` at time `u`.
pub fn heat_cutoff(params: &ModelParams, u: f64) -> usize {
    let m = params.mu0();
    ((40.0 / (2.0 * m * u)).ceil() as usize + 8).clamp(24, 80)
}

/// Largest deviation between the closed-form heat kernel and the spectral
/// evaluation of `exp(−u·fock_matrix(L⁰₂,ℂ))` over pairs of grid points.
pub fn mehler_vs_matrix(params: &ModelParams, u: f64, grid: &GridSpec) -> Result<f64, NumericError> {
    let spec = FockBasisSpec::new(params.n(), heat_cutoff(params, u), false, Modes::Full)?;
    let space = FockSpace::new(spec.clone(), params.clone())?;
    let spectral = l0_matrix(&spec, params)?.spectral();
    let pts = grid.coordinates();
    let mut dev: f64 = 0.0;
    for z in &pts {
        for zp in &pts {
            let num = position_kernel(&space, &spectral, |l| (-u * l).exp(), z, zp)[(0, 0)];
            dev = dev.max((num - mehler_kernel_closed(params, u, z, zp)).norm());
        }
    }
    Ok(dev)
}

/// Reproducing property `∫ P(Z, W) P(W, Z′) dW = P(Z, Z′)` by Gauss–Hermite
/// quadrature; returns the largest deviation over pairs of grid points.
pub fn reproducing_defect(params: &ModelParams, grid: &GridSpec, order: usize) -> f64 {
    let scales: Vec<f64> = params.a.iter().flat_map(|a| [a.abs() / 2.0; 2]).collect();
    let pts = grid.coordinates();
    let mut dev: f64 = 0.0;
    for z in &pts {
        for zp in &pts {
            let lhs = integrate_gaussian(&scales, order, |w| {
                bergman_kernel_closed(params, z, w).0 * bergman_kernel_closed(params, w, zp).0
            });
            dev = dev.max((lhs - bergman_kernel_closed(params, z, zp).0).norm());
        }
    }
    dev
}

/// Semigroup property `K_u ∘ K_v = K_{u+v}` of the closed-form heat kernel.
pub fn semigroup_defect(params: &ModelParams, u: f64, v: f64, grid: &GridSpec, order: usize) -> f64 {
    let scales: Vec<f64> = params
        .a
        .iter()
        .flat_map(|a| {
            let m = a.abs();
            [m / 4.0 * (1.0 / (m * u).tanh() + 1.0 / (m * v).tanh()); 2]
        })
        .collect();
    let pts = grid.coordinates();
    let mut dev: f64 = 0.0;
    for z in &pts {
        for zp in &pts {
            let lhs = integrate_gaussian(&scales, order, |w| {
                mehler_kernel_closed(params, u, z, w) * mehler_kernel_closed(params, v, w, zp)
            });
            dev = dev.max((lhs - mehler_kernel_closed(params, u + v, z, zp)).norm());
        }
    }
    dev
}

/// Ground space of `L⁰₂` (Landau basis with exterior factor): its
/// dimension and the largest component norm outside `det(W̄*)`.
pub fn kernel_leakage(params: &ModelParams, cutoff: usize) -> Result<(usize, f64), NumericError> {
    let spec = FockBasisSpec::new(params.n(), cutoff, true, Modes::Landau)?;
    let m = l02_matrix(&spec, params)?;
    let e = spec.ext_dim();
    let mask = params.kernel_mask();
    let ground: Vec<DVector<C>> =
        m.spectral().pairs().into_iter().filter(|(l, _)| l.abs() < params.mu0()).map(|p| p.1).collect();
    let leak = ground
        .iter()
        .map(|v| v.iter().enumerate().filter(|(i, _)| i % e != mask).map(|(_, x)| x.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    Ok((ground.len(), leak))
}

/// `P^{L⁰₂}(0, 0)` assembled from the numerical ground space of `L⁰₂`.
pub fn b0_numeric(params: &ModelParams, cutoff: usize) -> Result<DMatrix<C>, NumericError> {
    let spec = FockBasisSpec::new(params.n(), cutoff, true, Modes::Full)?;
    let space = FockSpace::new(spec.clone(), params.clone())?;
    let m: FockMatrix = l02_matrix(&spec, params)?;
    let zero = vec![0.0; 2 * params.n()];
    let gap = params.mu0();
    Ok(position_kernel(&space, &m.spectral(), |l| if l.abs() < gap { 1.0 } else { 0.0 }, &zero, &zero))
}

/// Least-squares fit of `log sup|e^{−uL⁰₂}(0,0) − P^{L⁰₂}(0,0)|` against `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub samples: Vec<(f64, f64)>,
}

pub fn heat_to_bergman_rate(params: &ModelParams) -> RateFit {
    let zero = vec![0.0; 2 * params.n()];
    let p = b0_matrix(params);
    let m = params.mu0();
    let samples: Vec<(f64, f64)> = (0..=10)
        .map(|k| {
            let u = (3.0 + 0.6 * k as f64) / m;
            let d = mehler_kernel_twisted(params, u, &zero, &zero) - &p;
            (u, d.iter().map(|x| x.norm()).fold(0.0, f64::max).ln())
        })
        .collect();
    let k = samples.len() as f64;
    let (sx, sy) = samples.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let sxy: f64 = samples.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = samples.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    RateFit { slope, intercept: my - slope * mx, samples }
}

/// Smallest nonzero eigenvalue of `L⁰₂` from the dense Landau-basis matrix.
pub fn first_excited_l02(params: &ModelParams, cutoff: usize) -> Result<f64, NumericError> {
    let spec = FockBasisSpec::new(params.n(), cutoff, true, Modes::Landau)?;
    let ev = l02_matrix(&spec, params)?.eigenvalues();
    ev.into_iter()
        .find(|l| *l > 1e-8)
        .ok_or_else(|| NumericError::InvalidSpec("no excited eigenvalue within the truncation".into()))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn p(a: &[f64]) -> ModelParams {
        ModelParams::new(a.iter().map(|x| x * PI).collect()).unwrap()
    }

    #[test]
    fn closed_form_specializations() {
        let std1 = ModelParams::standard(1);
        let (v, proj) = bergman_kernel_closed(&ModelParams::standard(2), &[0.0; 4], &[0.0; 4]);
        assert!((v - C::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(proj[(0, 0)], C::new(1.0, 0.0));
        let z = [0.3, -0.7];
        let (v, _) = bergman_kernel_closed(&std1, &z, &[0.0, 0.0]);
        assert!((v.re - (-PI * 0.58 / 2.0).exp()).abs() < 1e-14 && v.im.abs() < 1e-15);
        // holomorphic form exp(−π/2(|z|²+|z′|²) + π z z̄′)
        let (zz, wp) = (C::new(0.3, -0.7), C::new(-0.2, 0.4));
        let hol = (-PI / 2.0 * (zz.norm_sqr() + wp.norm_sqr()) + PI * zz * wp.conj()).exp();
        let (v, _) = bergman_kernel_closed(&std1, &[0.3, -0.7], &[-0.2, 0.4]);
        assert!((v - hol).norm() < 1e-14);
        for u in [0.05, 0.1, 1.0] {
            let k = mehler_kernel_closed(&std1, u, &[0.0, 0.0], &[0.0, 0.0]);
            assert!((k.re - 1.0 / (1.0 - (-4.0 * PI * u).exp())).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_kernel_tends_to_bergman() {
        for params in [p(&[2.0]), p(&[-2.0]), p(&[-2.0, 4.0])] {
            let z: Vec<f64> = (0..2 * params.n()).map(|i| 0.2 * i as f64 - 0.3).collect();
            let zp: Vec<f64> = (0..2 * params.n()).map(|i| 0.5 - 0.15 * i as f64).collect();
            let (pv, proj) = bergman_kernel_closed(&params, &z, &zp);
            assert!((mehler_kernel_closed(&params, 30.0, &z, &zp) - pv).norm() < 1e-10);
            let tw = mehler_kernel_twisted(&params, 30.0, &z, &zp);
            assert!((tw - proj * pv).norm() < 1e-10);
        }
    }

    #[test]
    fn wavefunctions_are_orthonormal() {
        for a in [2.0, -3.0] {
            let params = p(&[a]);
            let space = FockSpace::new(FockBasisSpec::new(1, 6, false, Modes::Full).unwrap(), params.clone()).unwrap();
            let s = params.a[0].abs() / 2.0;
            let d = space.states.len();
            for (i, j) in [(0, 0), (1, 1), (3, 7), (5, 5), (10, 20), (27, 27)] {
                let (i, j) = (i.min(d - 1), j.min(d - 1));
                let g = integrate_gaussian(&[s, s], 40, |z| {
                    let w = wavefunctions(&space, z);
                    w[i] * w[j].conj()
                });
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((g - C::new(expected, 0.0)).norm() < 1e-10, "({i},{j}) {g}");
            }
        }
    }

    #[test]
    fn projector_matches_closed_form_both_signs() {
        let grid = GridSpec::new(1, 1.0, 5).unwrap();
        for a in [2.0, -2.0] {
            let c = projector_vs_closed(&p(&[a]), 40, &grid).unwrap();
            assert!(c.pointwise < 1e-6 && c.idempotence < 1e-8, "{a}: {c:?}");
        }
    }

    #[test]
    fn reproducing_and_semigroup() {
        let grid = GridSpec::new(1, 0.8, 3).unwrap();
        for a in [2.0, -2.0, 5.0] {
            assert!(reproducing_defect(&p(&[a]), &grid, 40) < 1e-10);
            assert!(semigroup_defect(&p(&[a]), 0.1, 0.25, &grid, 40) < 1e-10);
        }
        let grid2 = GridSpec::new(2, 0.5, 2).unwrap();
        assert!(reproducing_defect(&p(&[-2.0, 4.0]), &grid2, 24) < 1e-10);
    }

    #[test]
    fn mehler_matches_matrix_exponential() {
        let grid = GridSpec::new(1, 0.5, 3).unwrap();
        for u in [0.05, 0.1, 0.5, 1.0] {
            let dev = mehler_vs_matrix(&ModelParams::standard(1), u, &grid).unwrap();
            assert!(dev < 1e-6, "u = {u}: {dev}");
        }
    }

    #[test]
    fn mixed_curvature_kernel() {
        for (a, dim) in [(vec![2.0], 1), (vec![-2.0], 1), (vec![-2.0, 4.0], 1)] {
            let (d, leak) = kernel_leakage(&p(&a), 8).unwrap();
            assert_eq!(d, dim);
            assert!(leak < 1e-8);
        }
    }

    #[test]
    fn b0_three_sign_patterns() {
        for a in [vec![2.0], vec![-2.0], vec![-2.0, 4.0]] {
            let params = p(&a);
            let num = b0_numeric(&params, 4).unwrap();
            assert!((num - b0_matrix(&params)).norm() < 1e-12, "{a:?}");
        }
        assert!((b0_matrix(&p(&[-2.0, 4.0]))[(1, 1)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn decay_rate_matches_first_excited_eigenvalue() {
        for a in [vec![2.0], vec![-2.0], vec![2.0, 6.0], vec![-2.0, 6.0]] {
            let params = p(&a);
            let fit = heat_to_bergman_rate(&params);
            let lam = first_excited_l02(&params, 6).unwrap();
            assert!((fit.slope + lam).abs() < 0.05 * lam, "{a:?}: {} vs {lam}", fit.slope);
        }
    }
}
