//! Gauss–Hermite quadrature (Golub–Welsch) and Gaussian-weighted product
//! rules on `ℝ^d`.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Nodes and weights for `∫ f(x) e^{−x²} dx`.
pub fn gauss_hermite(order: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(order, order, |r, c| {
        if r + 1 == c || c + 1 == r {
            (r.max(c) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

/// `∫_{ℝ^d} f(x) dx` for integrands of the form `g(x)·exp(−Σ s_i x_i²)` with
/// `g` slowly growing; `scales` gives the `s_i`.
pub fn integrate_gaussian(scales: &[f64], order: usize, f: impl Fn(&[f64]) -> Complex64) -> Complex64 {
    let (nodes, weights) = gauss_hermite(order);
    let d = scales.len();
    let jac: f64 = scales.iter().map(|s| 1.0 / s.sqrt()).product();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut acc = Complex64::new(0.0, 0.0);
    loop {
        let mut w = 1.0;
        let mut expo = 0.0;
        for i in 0..d {
            let y = nodes[idx[i]];
            x[i] = y / scales[i].sqrt();
            w *= weights[idx[i]];
            expo += y * y;
        }
        acc += f(&x) * (w * expo.exp());
        let mut i = 0;
        loop {
            if i == d {
                return acc * jac;
            }
            idx[i] += 1;
            if idx[i] < order {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_are_exact() {
        let (x, w) = gauss_hermite(20);
        let m = |k: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum::<f64>();
        let sp = std::f64::consts::PI.sqrt();
        assert!((m(0) - sp).abs() < 1e-12);
        assert!(m(1).abs() < 1e-12);
        assert!((m(2) - sp / 2.0).abs() < 1e-12);
        assert!((m(10) - sp * 945.0 / 32.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_with_phase() {
        // ∫ e^{−2|x|² + i x₀} dx over ℝ² = (π/2) e^{−1/8}
        let v = integrate_gaussian(&[2.0, 2.0], 30, |x| {
            Complex64::new(-2.0 * (x[0] * x[0] + x[1] * x[1]), x[0]).exp()
        });
        let expected = std::f64::consts::PI / 2.0 * (-1.0f64 / 8.0).exp();
        assert!((v - Complex64::new(expected, 0.0)).norm() < 1e-12);
    }
}
