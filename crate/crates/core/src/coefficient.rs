//! Exact coefficients: Laurent polynomials in π with Gaussian-rational
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A Gaussian rational `p + q i` with `p, q ∈ ℚ`.
pub type GaussRat = Complex<BigRational>;

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn gauss(re: BigRational, im: BigRational) -> GaussRat {
    Complex::new(re, im)
}

/// `Σ_k c_k π^k` with finitely many non-zero `c_k`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Coefficient {
    terms: BTreeMap<i32, GaussRat>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(GaussRat::one(), 0)
    }

    pub fn monomial(c: GaussRat, pi_power: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(pi_power, c);
        }
        Self { terms }
    }

    pub fn int(k: i64) -> Self {
        Self::monomial(Complex::new(rat(k, 1), rat(0, 1)), 0)
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::monomial(Complex::new(rat(num, den), rat(0, 1)), 0)
    }

    /// `(re + im·i) π^k` with small rational parts.
    pub fn new(re: (i64, i64), im: (i64, i64), pi_power: i32) -> Self {
        Self::monomial(Complex::new(rat(re.0, re.1), rat(im.0, im.1)), pi_power)
    }

    pub fn i() -> Self {
        Self::monomial(Complex::new(rat(0, 1), rat(1, 1)), 0)
    }

    pub fn pi_pow(k: i32) -> Self {
        Self::monomial(GaussRat::one(), k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &GaussRat)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v.conj())).collect(),
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn shift_pi(&self, by: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k + by, v.clone())).collect(),
        }
    }

    /// The single `(c, k)` pair when the coefficient is a monomial in π.
    pub fn as_monomial(&self) -> Option<(&GaussRat, i32)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(k, v)| (v, *k))
        } else {
            None
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, v)| {
                let s = std::f64::consts::PI.powi(*k);
                Complex64::new(
                    v.re.to_f64().unwrap_or(f64::NAN) * s,
                    v.im.to_f64().unwrap_or(f64::NAN) * s,
                )
            })
            .sum()
    }

    fn insert_add(&mut self, k: i32, v: GaussRat) {
        let e = self.terms.entry(k).or_insert_with(GaussRat::zero);
        *e = &*e + v;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: Coefficient) -> Coefficient {
        &self + &rhs
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, rhs: &Coefficient) {
        for (k, v) in &rhs.terms {
            self.insert_add(*k, v.clone());
        }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        self + &(-rhs)
    }
}

impl Sub for Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: Coefficient) -> Coefficient {
        &self - &rhs
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        let mut out = Coefficient::zero();
        for (k1, v1) in &self.terms {
            for (k2, v2) in &rhs.terms {
                out.insert_add(k1 + k2, v1 * v2);
            }
        }
        out
    }
}

impl Mul for Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: Coefficient) -> Coefficient {
        &self * &rhs
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Text form of a Gaussian rational, e.g. `2`, `-1/3i`, `(1/2+1/3i)`.
pub fn fmt_gauss(c: &GaussRat) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (true, true) => "0".into(),
        (false, true) => fmt_rat(&c.re),
        (true, false) => format!("{}i", fmt_rat(&c.im)),
        (false, false) => {
            let sign = if c.im.is_negative() { "-" } else { "+" };
            format!("({}{}{}i)", fmt_rat(&c.re), sign, fmt_rat(&c.im.abs()))
        }
    }
}

/// Inverse of [`fmt_gauss`].
pub fn parse_gauss(s: &str) -> Option<GaussRat> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        let inner = inner.strip_suffix('i')?;
        // split at the last sign that is not leading
        let pos = inner
            .char_indices()
            .skip(1)
            .filter(|(_, ch)| *ch == '+' || *ch == '-')
            .map(|(p, _)| p)
            .last()?;
        let re = parse_rat(&inner[..pos])?;
        let im = parse_rat(&inner[pos..])?;
        return Some(Complex::new(re, im));
    }
    if let Some(im) = s.strip_suffix('i') {
        let im = if im.is_empty() || im == "+" {
            rat(1, 1)
        } else if im == "-" {
            rat(-1, 1)
        } else {
            parse_rat(im)?
        };
        return Some(Complex::new(rat(0, 1), im));
    }
    Some(Complex::new(parse_rat(s)?, rat(0, 1)))
}

fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.strip_prefix('+').unwrap_or(s);
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| match k {
                0 => fmt_gauss(v),
                1 => format!("{} pi", fmt_gauss(v)),
                _ => format!("{} pi^{}", fmt_gauss(v), k),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coefficient({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_in_pi() {
        let a = Coefficient::new((1, 3), (0, 1), -1);
        let b = Coefficient::pi_pow(1);
        assert_eq!(&a * &b, Coefficient::ratio(1, 3));
        let s = &a + &a;
        assert_eq!(s, Coefficient::new((2, 3), (0, 1), -1));
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn gauss_text_round_trip() {
        for (re, im) in [(1, 0), (0, 1), (-1, 3), (2, -5), (0, -7)] {
            let c = Complex::new(rat(re, 3), rat(im, 4));
            assert_eq!(parse_gauss(&fmt_gauss(&c)).unwrap(), c);
        }
    }

    #[test]
    fn numeric_value() {
        let c = Coefficient::new((0, 1), (1, 2), 1);
        let v = c.to_complex64();
        assert!((v.im - std::f64::consts::PI / 2.0).abs() < 1e-15);
        assert_eq!(c.conj().to_complex64(), v.conj());
    }
}
