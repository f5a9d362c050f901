//! Landau levels of the flat unit torus with `2πp` flux: 5-point magnetic
//! Laplacian with Peierls link phases, shifted by the zero-point energy
//! `2πp`, and its lowest eigenvalues by Chebyshev-filtered subspace
//! iteration.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::NumericError;

type C = Complex64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusSpec {
    pub flux: usize,
    pub grid: usize,
}

impl TorusSpec {
    /// Requires `p ≥ 1` and `m ≥ 8√p` so the magnetic length is resolved.
    pub fn new(flux: usize, grid: usize) -> Result<Self, NumericError> {
        if flux == 0 {
            return Err(NumericError::InvalidSpec("flux must be at least 1".into()));
        }
        if (grid as f64) < 8.0 * (flux as f64).sqrt() {
            return Err(NumericError::Resolution(format!(
                "grid {grid} does not resolve the magnetic length at flux {flux} (need m ≥ 8√p)"
            )));
        }
        Ok(Self { flux, grid })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusResult {
    pub flux: usize,
    pub grid: usize,
    pub low_cluster: Vec<f64>,
    pub next: f64,
    pub gap: f64,
    pub error_estimate: f64,
}

/// Discrete magnetic Laplacian minus `2πp` on an `m × m` periodic grid.
/// Link phases: `U_y(i, j) = e^{iΦi}`, `U_x(i, j) = 1` except across the
/// seam `U_x(m−1, j) = e^{−iΦmj}`, with plaquette flux `Φ = 2πp/m²`.
pub struct MagneticLaplacian {
    m: usize,
    inv_h2: f64,
    shift: f64,
    phi: f64,
}

impl MagneticLaplacian {
    pub fn new(spec: &TorusSpec) -> Self {
        let m = spec.grid;
        let p = spec.flux as f64;
        Self { m, inv_h2: (m * m) as f64, shift: 2.0 * PI * p, phi: 2.0 * PI * p / (m * m) as f64 }
    }

    pub fn dim(&self) -> usize {
        self.m * self.m
    }

    fn site(&self, i: usize, j: usize) -> usize {
        i * self.m + j
    }

    fn ux(&self, i: usize, j: usize) -> C {
        if i + 1 == self.m {
            C::from_polar(1.0, -self.phi * (self.m * j) as f64)
        } else {
            C::new(1.0, 0.0)
        }
    }

    fn uy(&self, i: usize) -> C {
        C::from_polar(1.0, self.phi * i as f64)
    }

    /// Gershgorin upper bound of the spectrum.
    pub fn upper_bound(&self) -> f64 {
        8.0 * self.inv_h2 - self.shift
    }

    pub fn apply(&self, x: &DMatrix<C>) -> DMatrix<C> {
        let m = self.m;
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for i in 0..m {
            for j in 0..m {
                let s = self.site(i, j);
                let (ip, im) = ((i + 1) % m, (i + m - 1) % m);
                let (jp, jm) = ((j + 1) % m, (j + m - 1) % m);
                let links = [
                    (self.site(ip, j), self.ux(i, j)),
                    (self.site(im, j), self.ux(im, j).conj()),
                    (self.site(i, jp), self.uy(i)),
                    (self.site(i, jm), self.uy(i).conj()),
                ];
                for c in 0..x.ncols() {
                    let mut acc = x[(s, c)] * (4.0 * self.inv_h2 - self.shift);
                    for (t, u) in links {
                        acc -= u * x[(t, c)] * self.inv_h2;
                    }
                    out[(s, c)] = acc;
                }
            }
        }
        out
    }

    /// Dense matrix, for small grids and tests.
    pub fn dense(&self) -> DMatrix<C> {
        self.apply(&DMatrix::identity(self.dim(), self.dim()))
    }
}

fn orthonormalize(x: DMatrix<C>) -> DMatrix<C> {
    x.qr().q()
}

/// Lowest `want` eigenvalues by Chebyshev-filtered subspace iteration with
/// `block` vectors; residuals are driven below `tol`.
pub fn lowest_eigenvalues(
    op: &MagneticLaplacian,
    want: usize,
    block: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<f64>, NumericError> {
    let d = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = orthonormalize(DMatrix::from_fn(d, block, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
    let upper = op.upper_bound();
    let degree = 40;
    let mut cut = upper / 20.0;
    for _ in 0..400 {
        // Chebyshev filter damping [cut, upper]
        let e = (upper - cut) / 2.0;
        let c = (upper + cut) / 2.0;
        let mut prev = x.clone();
        let mut cur = (op.apply(&x) - &x * C::new(c, 0.0)) / C::new(e, 0.0);
        for _ in 2..=degree {
            let next = (op.apply(&cur) - &cur * C::new(c, 0.0)) * C::new(2.0 / e, 0.0) - &prev;
            prev = cur;
            cur = next;
        }
        let q = orthonormalize(cur);
        let hq = op.apply(&q);
        let g = q.adjoint() * &hq;
        let g = (&g + g.adjoint()) * C::new(0.5, 0.0);
        let eig = g.symmetric_eigen();
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
        let vecs = DMatrix::from_fn(block, block, |r, c| eig.eigenvectors[(r, order[c])]);
        let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        x = &q * &vecs;
        let hx = &hq * &vecs;
        let converged = (0..want).all(|k| (hx.column(k) - x.column(k) * C::new(vals[k], 0.0)).norm() < tol);
        if converged {
            return Ok(vals[..want].to_vec());
        }
        cut = vals[block - 1];
    }
    Err(NumericError::NoConvergence(format!("{want} lowest torus eigenvalues after 400 filter passes")))
}

/// Lowest Landau cluster (expected: `p` eigenvalues near 0) and the gap to
/// the next cluster (expected: `≈ 4πp`).
pub fn torus_gap_demo(spec: &TorusSpec) -> Result<TorusResult, NumericError> {
    let p = spec.flux;
    let op = MagneticLaplacian::new(spec);
    let want = p + 1;
    let vals = lowest_eigenvalues(&op, want, 2 * p + 4, 1e-6, 7 + p as u64)?;
    let mid = 2.0 * PI * p as f64;
    let low_cluster: Vec<f64> = vals.iter().copied().filter(|v| *v < mid).collect();
    let Some(&next) = vals.iter().find(|v| **v >= mid) else {
        return Err(NumericError::Resolution("no eigenvalue above the lowest cluster".into()));
    };
    let top = low_cluster.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let error_estimate = low_cluster.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let gap = next - top;
    if gap < 10.0 * error_estimate {
        return Err(NumericError::Resolution(format!(
            "cluster separation {gap:.4} is below 10× the discretization error {error_estimate:.4}"
        )));
    }
    Ok(TorusResult { flux: p, grid: spec.grid, low_cluster, next, gap, error_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_is_hermitian_with_quantized_flux() {
        let op = MagneticLaplacian::new(&TorusSpec::new(2, 12).unwrap());
        let h = op.dense();
        assert!((&h - h.adjoint()).norm() < 1e-9);
        // every plaquette carries the same flux, including across both seams
        let m = op.m;
        for i in 0..m {
            for j in 0..m {
                let (ip, jp) = ((i + 1) % m, (j + 1) % m);
                let loop_phase = op.ux(i, j) * op.uy(ip) * op.ux(i, jp).conj() * op.uy(i).conj();
                assert!((loop_phase - C::from_polar(1.0, op.phi)).norm() < 1e-9, "({i},{j})");
            }
        }
    }

    #[test]
    fn subspace_iteration_matches_dense() {
        let spec = TorusSpec::new(2, 16).unwrap();
        let op = MagneticLaplacian::new(&spec);
        let mut dense: Vec<f64> = op.dense().symmetric_eigen().eigenvalues.iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        let iter = lowest_eigenvalues(&op, 3, 8, 1e-8, 1).unwrap();
        for k in 0..3 {
            assert!((iter[k] - dense[k]).abs() < 1e-8, "{k}: {} vs {}", iter[k], dense[k]);
        }
    }

    #[test]
    fn landau_clusters() {
        for p in [1, 3] {
            let r = torus_gap_demo(&TorusSpec::new(p, 64).unwrap()).unwrap();
            assert_eq!(r.low_cluster.len(), p);
            assert!(r.low_cluster.iter().all(|v| v.abs() < 0.5));
            let target = 4.0 * PI * p as f64;
            assert!((r.gap - target).abs() < 0.05 * target, "p={p}: {}", r.gap);
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        assert!(matches!(TorusSpec::new(4, 12), Err(NumericError::Resolution(_))));
        assert!(TorusSpec::new(0, 64).is_err());
    }
}
