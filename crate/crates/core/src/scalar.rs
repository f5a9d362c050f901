//! Minimal field abstraction shared by exact and floating evaluation.

use num_complex::Complex64;

use crate::coefficient::Coefficient;

pub trait Scalar: Clone + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn from_coeff(c: &Coefficient) -> Self;
    fn is_zero(&self) -> bool;

    fn from_int(k: i64) -> Self {
        Self::from_coeff(&Coefficient::int(k))
    }
    fn neg(&self) -> Self {
        self.mul(&Self::from_int(-1))
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn from_coeff(c: &Coefficient) -> Self {
        c.to_complex64()
    }
    fn is_zero(&self) -> bool {
        self.norm() == 0.0
    }
}

impl Scalar for Coefficient {
    fn zero() -> Self {
        Coefficient::zero()
    }
    fn one() -> Self {
        Coefficient::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn from_coeff(c: &Coefficient) -> Self {
        c.clone()
    }
    fn is_zero(&self) -> bool {
        Coefficient::is_zero(self)
    }
}

/// Dense square matrix over a [`Scalar`].
#[derive(Clone, Debug)]
pub struct Matrix<S> {
    pub dim: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![S::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = S::one();
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.dim + c] = v;
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let x = self.get(i, k);
                if x.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let y = rhs.get(k, j);
                    if !y.is_zero() {
                        let v = out.get(i, j).add(&x.mul(y));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a.mul(s)).collect() }
    }

    pub fn trace(&self) -> S {
        (0..self.dim).fold(S::zero(), |acc, i| acc.add(self.get(i, i)))
    }
}
