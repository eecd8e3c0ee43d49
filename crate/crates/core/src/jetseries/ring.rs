use crate::error::{Error, Result};
use crate::special::RealPolynomial;
use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficient ring for [`GradedSeries`](super::GradedSeries).
///
/// Division only ever happens by constant terms, which must be scalars.
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_scalar(c: Complex64) -> Self;
    fn scale(&self, c: Complex64) -> Self;
    fn is_zero(&self) -> bool;
    /// The value as a complex scalar, if it is one.
    fn as_scalar(&self) -> Option<Complex64>;
}

impl Coefficient for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_scalar(c: Complex64) -> Self {
        c
    }
    fn scale(&self, c: Complex64) -> Self {
        self * c
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn as_scalar(&self) -> Option<Complex64> {
        Some(*self)
    }
}

/// Dense polynomial in an indeterminate `x` with complex coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `x^k`
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn from_real(p: &RealPolynomial) -> Self {
        Self::new(p.coeffs().iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Real part, provided every imaginary part is within `tol` of the
    /// largest coefficient magnitude.
    pub fn to_real(&self, tol: f64) -> Result<RealPolynomial> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let worst = self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        if worst > tol * scale {
            return Err(Error::Validation(format!(
                "polynomial has imaginary part {worst:e} relative to {scale:e}"
            )));
        }
        Ok(RealPolynomial::new(self.coeffs.iter().map(|c| c.re).collect()))
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Self::new(
            (0..len)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero)
                        + other.coeffs.get(k).copied().unwrap_or(zero) * sign
                })
                .collect(),
        )
    }
}

impl Add for ComplexPolynomial {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.combine(&rhs, 1.0)
    }
}

impl Sub for ComplexPolynomial {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.combine(&rhs, -1.0)
    }
}

impl Neg for ComplexPolynomial {
    type Output = Self;
    fn neg(self) -> Self {
        Self { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Mul for ComplexPolynomial {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::default();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }
}

impl Coefficient for ComplexPolynomial {
    fn zero() -> Self {
        Self::default()
    }
    fn from_scalar(c: Complex64) -> Self {
        Self::new(vec![c])
    }
    fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn as_scalar(&self) -> Option<Complex64> {
        match self.coeffs.len() {
            0 => Some(Complex64::new(0.0, 0.0)),
            1 => Some(self.coeffs[0]),
            _ => None,
        }
    }
}
