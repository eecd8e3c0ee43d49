//! Truncated power series with an exact quarter-integer leading exponent.
//!
//! A [`GradedSeries`] with exponent `σ` and coefficients `c_0..c_N` stands for
//! `z^σ (c_0 + c_1 z + … + c_N z^N + O(z^(N+1)))`. The coefficients live in a
//! [`Coefficient`] ring: complex scalars, or polynomials in a second
//! indeterminate when whole polynomial families are extracted at once.

mod ring;

pub use ring::{Coefficient, ComplexPolynomial};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Exact exponent in units of 1/4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Exponent(i32);

impl Exponent {
    pub const ZERO: Exponent = Exponent(0);

    pub const fn from_quarters(q: i32) -> Self {
        Exponent(q)
    }

    pub const fn integer(k: i32) -> Self {
        Exponent(4 * k)
    }

    /// `num/den` with `den` dividing 4.
    pub fn from_ratio(num: i32, den: i32) -> Result<Self> {
        if den <= 0 || 4 % den != 0 {
            return Err(Error::OffGridExponent(num as f64 / den as f64));
        }
        Ok(Exponent(num * (4 / den)))
    }

    /// Rounds a real exponent onto the quarter grid, rejecting values more than
    /// 1e-12 away from it.
    pub fn from_f64(v: f64) -> Result<Self> {
        let q = (4.0 * v).round();
        if !v.is_finite() || (4.0 * v - q).abs() > 1e-12 || q.abs() > i32::MAX as f64 {
            return Err(Error::OffGridExponent(v));
        }
        Ok(Exponent(q as i32))
    }

    pub const fn quarters(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 4.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 4 == 0
    }

    pub fn halve(self) -> Option<Self> {
        (self.0 % 2 == 0).then_some(Exponent(self.0 / 2))
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Self) -> Self {
        Exponent(self.0 + rhs.0)
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: Self) -> Self {
        Exponent(self.0 - rhs.0)
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Self {
        Exponent(-self.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 4)
        } else if self.0 % 2 == 0 {
            write!(f, "{}/2", self.0 / 2)
        } else {
            write!(f, "{}/4", self.0)
        }
    }
}

/// Which square root to take of the constant term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Principal,
    Alternative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedSeries<R: Coefficient> {
    sigma: Exponent,
    coeffs: Vec<R>,
}

pub type ComplexSeries = GradedSeries<Complex64>;
pub type PolySeries = GradedSeries<ComplexPolynomial>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl<R: Coefficient> GradedSeries<R> {
    /// Builds `z^sigma Σ coeffs[k] z^k`, shifting leading zeros into `sigma`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn new(sigma: Exponent, coeffs: Vec<R>) -> Self {
        assert!(!coeffs.is_empty(), "a graded series needs at least one coefficient");
        let mut s = Self { sigma, coeffs };
        s.canonicalize();
        s
    }

    fn canonicalize(&mut self) {
        if let Some(first) = self.coeffs.iter().position(|c| !c.is_zero()) {
            if first > 0 {
                self.coeffs.drain(..first);
                self.sigma = self.sigma + Exponent::integer(first as i32);
            }
        }
    }

    pub fn constant(value: R, order: usize) -> Self {
        let mut coeffs = vec![R::zero(); order + 1];
        coeffs[0] = value;
        Self::new(Exponent::ZERO, coeffs)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(R::from_scalar(c(1.0)), order)
    }

    /// `z^k` known through relative order `order`.
    pub fn monomial(k: Exponent, order: usize) -> Self {
        let mut s = Self::one(order);
        s.sigma = k;
        s
    }

    /// Polynomial in z with integer powers; pads or truncates to `order`.
    pub fn polynomial(mut coeffs: Vec<R>, order: usize) -> Self {
        coeffs.resize(order + 1, R::zero());
        Self::new(Exponent::ZERO, coeffs)
    }

    pub fn sigma(&self) -> Exponent {
        self.sigma
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `c_k`, the coefficient of `z^(σ+k)`.
    pub fn coefficient(&self, k: usize) -> Result<&R> {
        self.coeffs.get(k).ok_or(Error::IndexOutOfRange { index: k, order: self.order() })
    }

    /// Multiplies by `z^e`.
    pub fn shift(&self, e: Exponent) -> Self {
        Self { sigma: self.sigma + e, coeffs: self.coeffs.clone() }
    }

    /// Keeps only `c_0..c_order`.
    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        Self { sigma: self.sigma, coeffs }
    }

    pub fn map<S: Coefficient, F: Fn(&R) -> S>(&self, f: F) -> GradedSeries<S> {
        GradedSeries::new(self.sigma, self.coeffs.iter().map(f).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.sigma, self.coeffs.iter().map(|a| a.scale(s)).collect())
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s))
    }

    /// Multiplies every coefficient by a ring element.
    pub fn scale_by(&self, r: &R) -> Self {
        Self::new(self.sigma, self.coeffs.iter().map(|a| a.clone() * r.clone()).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(c(-1.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let diff = (other.sigma - self.sigma).quarters();
        if diff % 4 != 0 {
            if other.is_zero() {
                return Ok(self.clone());
            }
            if self.is_zero() {
                return Ok(other.clone());
            }
            return Err(Error::FractionalExponent(diff));
        }
        let lo = self.sigma.min(other.sigma);
        let off_a = ((self.sigma - lo).quarters() / 4) as usize;
        let off_b = ((other.sigma - lo).quarters() / 4) as usize;
        let top = (off_a + self.order()).min(off_b + other.order());
        let coeffs = (0..=top)
            .map(|i| {
                let a = i.checked_sub(off_a).and_then(|k| self.coeffs.get(k)).cloned();
                let b = i.checked_sub(off_b).and_then(|k| other.coeffs.get(k)).cloned();
                match (a, b) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) => a,
                    (None, Some(b)) => b,
                    (None, None) => R::zero(),
                }
            })
            .collect();
        Ok(Self::new(lo, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|k| {
                (0..=k).fold(R::zero(), |acc, j| {
                    acc + self.coeffs[j].clone() * other.coeffs[k - j].clone()
                })
            })
            .collect();
        Self::new(self.sigma + other.sigma, coeffs)
    }

    fn scalar_constant(&self) -> Result<Complex64> {
        let c0 = self.coeffs[0].as_scalar().ok_or(Error::NonInvertibleConstant)?;
        if c0.norm() == 0.0 {
            return Err(Error::NonInvertibleConstant);
        }
        Ok(c0)
    }

    /// Multiplicative inverse; needs an invertible scalar constant term.
    pub fn inv(&self) -> Result<Self> {
        let a0 = self.scalar_constant()?;
        let inv0 = a0.inv();
        let mut d: Vec<R> = Vec::with_capacity(self.coeffs.len());
        d.push(R::from_scalar(inv0));
        for k in 1..self.coeffs.len() {
            let acc = (1..=k).fold(R::zero(), |acc, j| acc + self.coeffs[j].clone() * d[k - j].clone());
            d.push(acc.scale(-inv0));
        }
        Ok(Self::new(-self.sigma, d))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Square root with the requested sign of `√c_0`.
    pub fn sqrt(&self, branch: Branch) -> Result<Self> {
        let sigma = self.sigma.halve().ok_or(Error::FractionalExponent(self.sigma.quarters()))?;
        let a0 = self.scalar_constant()?;
        let r0 = match branch {
            Branch::Principal => a0.sqrt(),
            Branch::Alternative => -a0.sqrt(),
        };
        let half_inv = (2.0 * r0).inv();
        let mut r: Vec<R> = Vec::with_capacity(self.coeffs.len());
        r.push(R::from_scalar(r0));
        for k in 1..self.coeffs.len() {
            let cross = (1..k).fold(R::zero(), |acc, j| acc + r[j].clone() * r[k - j].clone());
            r.push((self.coeffs[k].clone() - cross).scale(half_inv));
        }
        Ok(Self::new(sigma, r))
    }

    /// Logarithm (principal log of the constant term). Requires σ = 0.
    pub fn log(&self) -> Result<Self> {
        if self.sigma != Exponent::ZERO {
            return Err(Error::FractionalExponent(self.sigma.quarters()));
        }
        if self.coeffs[0].is_zero() {
            return Err(Error::LogOfZero);
        }
        let a0 = self.scalar_constant()?;
        let inv0 = a0.inv();
        let mut l: Vec<R> = Vec::with_capacity(self.coeffs.len());
        l.push(R::from_scalar(a0.ln()));
        for k in 1..self.coeffs.len() {
            let acc = (1..k).fold(R::zero(), |acc, j| {
                acc + (l[j].clone() * self.coeffs[k - j].clone()).scale(c(j as f64))
            });
            let lk = (self.coeffs[k].clone() - acc.scale(c(1.0 / k as f64))).scale(inv0);
            l.push(lk);
        }
        Ok(Self::new(Exponent::ZERO, l))
    }

    /// Exponential. Requires σ ≥ 0 with an integer σ when it is positive.
    pub fn exp(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::one(self.order()));
        }
        if self.sigma < Exponent::ZERO || !self.sigma.is_integer() {
            return Err(Error::FractionalExponent(self.sigma.quarters()));
        }
        // Dense form starting at z^0; a positive σ means more terms are known.
        let lead = (self.sigma.quarters() / 4) as usize;
        let mut s = vec![R::zero(); lead];
        s.extend(self.coeffs.iter().cloned());
        let s0 = s[0].as_scalar().ok_or(Error::NonInvertibleConstant)?;
        let mut e: Vec<R> = Vec::with_capacity(s.len());
        e.push(R::from_scalar(s0.exp()));
        for k in 1..s.len() {
            let acc = (1..=k).fold(R::zero(), |acc, j| {
                acc + (s[j].clone() * e[k - j].clone()).scale(c(j as f64))
            });
            e.push(acc.scale(c(1.0 / k as f64)));
        }
        Ok(Self::new(Exponent::ZERO, e))
    }

    /// Real power `z^(ασ) exp(α log(a / z^σ))`; `ασ` must land on the quarter grid.
    pub fn powr(&self, alpha: f64) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::LogOfZero);
        }
        let sigma = Exponent::from_f64(alpha * self.sigma.value())
            .map_err(|_| Error::FractionalExponent(self.sigma.quarters()))?;
        let stripped = self.shift(-self.sigma);
        Ok(stripped.log()?.scale(c(alpha)).exp()?.shift(sigma))
    }

    /// Evaluates the truncated series at `z` using the principal `z^σ`.
    pub fn eval(&self, z: Complex64) -> R {
        let body = self
            .coeffs
            .iter()
            .rev()
            .fold(R::zero(), |acc, a| acc.scale(z) + a.clone());
        if self.sigma == Exponent::ZERO {
            body
        } else {
            body.scale((z.ln() * self.sigma.value()).exp())
        }
    }
}

impl GradedSeries<Complex64> {
    /// Lifts scalar coefficients into the polynomial ring.
    pub fn to_poly(&self) -> PolySeries {
        self.map(|&a| ComplexPolynomial::from_scalar(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const N: usize = 8;

    fn cs(re: &[f64]) -> Vec<Complex64> {
        re.iter().map(|&x| c(x)).collect()
    }

    fn assert_coeffs(s: &ComplexSeries, expected: &[f64], tol: f64) {
        for (k, &e) in expected.iter().enumerate() {
            let got = s.coefficient(k).unwrap();
            assert!((got - c(e)).norm() <= tol, "k = {k}: {got} vs {e}");
        }
    }

    fn one_plus_z() -> ComplexSeries {
        ComplexSeries::polynomial(cs(&[1.0, 1.0]), N)
    }

    fn rel_close(a: &ComplexSeries, b: &ComplexSeries, tol: f64) -> bool {
        a.sigma() == b.sigma()
            && a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).norm() <= tol * y.norm().max(1e-2))
    }

    #[test]
    fn exponent_arithmetic() {
        assert_eq!(Exponent::from_ratio(1, 2).unwrap(), Exponent::from_quarters(2));
        assert!(Exponent::from_ratio(1, 3).is_err());
        assert_eq!(Exponent::from_f64(-0.75).unwrap().quarters(), -3);
        assert!(Exponent::from_f64(0.3).is_err());
        assert_eq!(Exponent::from_quarters(3).halve(), None);
        assert_eq!(format!("{}", Exponent::from_quarters(6)), "3/2");
    }

    #[test]
    fn multiplication_examples() {
        let a = one_plus_z().shift(Exponent::from_quarters(2));
        let b = ComplexSeries::polynomial(cs(&[1.0, -1.0]), N).shift(Exponent::from_quarters(-2));
        let p = a.mul(&b);
        assert_eq!(p.sigma(), Exponent::ZERO);
        assert_coeffs(&p, &[1.0, 0.0, -1.0, 0.0], 0.0);
        let unit = ComplexSeries::one(N);
        assert_eq!(a.mul(&unit), a);
    }

    #[test]
    fn product_matches_pointwise_evaluation() {
        let a = ComplexSeries::new(Exponent::ZERO, (0..=N).map(|k| Complex64::new(0.3 * k as f64 - 1.0, 0.1 * k as f64)).collect());
        let b = ComplexSeries::new(Exponent::ZERO, (0..=N).map(|k| Complex64::new(1.0 / (k + 1) as f64, -0.2)).collect());
        let z = Complex64::new(0.05, 0.03);
        let err = (a.mul(&b).eval(z) - a.eval(z) * b.eval(z)).norm();
        assert!(err <= 10.0 * z.norm().powi(N as i32 + 1), "{err}");
    }

    #[test]
    fn square_roots() {
        let r = one_plus_z().sqrt(Branch::Principal).unwrap();
        assert_coeffs(&r, &[1.0, 0.5, -0.125, 0.0625], 1e-15);
        let zr = one_plus_z().shift(Exponent::integer(1)).sqrt(Branch::Principal).unwrap();
        assert_eq!(zr.sigma(), Exponent::from_quarters(2));
        assert_coeffs(&zr, &[1.0, 0.5, -0.125, 0.0625], 1e-15);
        let alt = one_plus_z().sqrt(Branch::Alternative).unwrap();
        assert_coeffs(&alt, &[-1.0, -0.5, 0.125, -0.0625], 1e-15);
        assert!(one_plus_z().shift(Exponent::from_quarters(1)).sqrt(Branch::Principal).is_err());
    }

    #[test]
    fn log_exp_powr() {
        // ln(1+z) has no constant term, so it starts at z^1.
        let l = one_plus_z().log().unwrap();
        assert_eq!(l.sigma(), Exponent::integer(1));
        assert_coeffs(&l, &[1.0, -0.5, 1.0 / 3.0, -0.25], 1e-15);
        let zero = ComplexSeries::constant(c(0.0), N);
        assert_eq!(zero.exp().unwrap(), ComplexSeries::one(N));
        let p = one_plus_z().powr(-0.5).unwrap();
        assert_coeffs(&p, &[1.0, -0.5, 0.375, -0.3125], 1e-15);
        assert!(one_plus_z().shift(Exponent::from_quarters(1)).log().is_err());
        assert!(one_plus_z().shift(Exponent::from_quarters(1)).powr(0.3).is_err());
        let q = one_plus_z().shift(Exponent::from_quarters(2)).powr(0.5).unwrap();
        assert_eq!(q.sigma(), Exponent::from_quarters(1));
        assert!(ComplexSeries::monomial(Exponent::integer(1), N).log().is_err());
    }

    #[test]
    fn coefficient_access() {
        let sq = one_plus_z().mul(&one_plus_z());
        assert_eq!(*sq.coefficient(1).unwrap(), c(2.0));
        let s = ComplexSeries::new(Exponent::from_quarters(1), cs(&[0.0, 3.0, 1.0]));
        assert_eq!(s.sigma(), Exponent::from_quarters(5));
        assert_eq!(*s.coefficient(0).unwrap(), c(3.0));
        let z = ComplexSeries::monomial(Exponent::integer(1), N);
        let e = z.exp().unwrap();
        assert!((e.coefficient(3).unwrap() - c(1.0 / 6.0)).norm() < 1e-16);
        assert!(matches!(sq.coefficient(N + 1), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn inverse_and_division() {
        let inv = one_plus_z().inv().unwrap();
        assert_coeffs(&inv, &[1.0, -1.0, 1.0, -1.0, 1.0], 0.0);
        assert!(ComplexSeries::monomial(Exponent::integer(1), N).sub(&ComplexSeries::monomial(Exponent::integer(1), N)).unwrap().inv().is_err());
        let q = one_plus_z().div(&one_plus_z()).unwrap();
        assert_coeffs(&q, &[1.0, 0.0, 0.0, 0.0], 1e-15);
    }

    #[test]
    fn addition_aligns_exponents() {
        let z = ComplexSeries::monomial(Exponent::integer(1), N);
        let s = ComplexSeries::one(N).add(&z).unwrap();
        assert_eq!(s.sigma(), Exponent::ZERO);
        assert_coeffs(&s, &[1.0, 1.0, 0.0], 0.0);
        assert_eq!(s.order(), N);
        let half = ComplexSeries::monomial(Exponent::from_quarters(2), N);
        assert!(s.add(&half).is_err());
        // 1 − (1 + z) cancels the leading term and shifts σ.
        let d = ComplexSeries::one(N).sub(&one_plus_z()).unwrap();
        assert_eq!(d.sigma(), Exponent::integer(1));
        assert_eq!(d.order(), N - 1);
    }

    #[test]
    fn polynomial_ring_instantiation() {
        // (1 + (1 − 2x²) z)^2 over polynomials in x
        let x2 = ComplexPolynomial::monomial(2);
        let one = ComplexPolynomial::from_scalar(c(1.0));
        let c1 = one.clone() - x2.scale(c(2.0));
        let s = PolySeries::polynomial(vec![one.clone(), c1.clone()], 4);
        let sq = s.mul(&s);
        assert_eq!(sq.coefficient(1).unwrap(), &(c1.clone() + c1.clone()));
        let r = sq.sqrt(Branch::Principal).unwrap();
        assert_eq!(r.coefficient(1).unwrap(), &c1);
        assert!(r.coefficient(2).unwrap().is_zero());
        let lg = s.log().unwrap().exp().unwrap();
        for k in 0..=4 {
            let diff = lg.coefficient(k).unwrap().clone() - s.coefficient(k).unwrap().clone();
            assert!(diff.coeffs().iter().all(|v| v.norm() < 1e-13));
        }
        let bad = PolySeries::polynomial(vec![x2, one], 4);
        assert_eq!(bad.inv(), Err(Error::NonInvertibleConstant));
    }

    fn series_strategy() -> impl Strategy<Value = ComplexSeries> {
        (0.5f64..2.0, 0.0f64..std::f64::consts::TAU, proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), N))
            .prop_map(|(m, ph, rest)| {
                let mut coeffs = vec![Complex64::from_polar(m, ph)];
                coeffs.extend(rest.into_iter().map(|(a, b)| Complex64::new(a, b)));
                ComplexSeries::new(Exponent::ZERO, coeffs)
            })
    }

    proptest! {
        #[test]
        fn exp_inverts_log(s in series_strategy()) {
            let back = s.log().unwrap().exp().unwrap();
            prop_assert!(rel_close(&back, &s, 1e-12));
        }

        #[test]
        fn sqrt_squares_back(s in series_strategy(), alt in any::<bool>()) {
            let branch = if alt { Branch::Alternative } else { Branch::Principal };
            let r = s.sqrt(branch).unwrap();
            prop_assert!(rel_close(&r.mul(&r), &s, 1e-12));
        }

        #[test]
        fn mul_commutes_and_associates(a in series_strategy(), b in series_strategy(), c3 in series_strategy()) {
            prop_assert!(rel_close(&a.mul(&b), &b.mul(&a), 1e-14));
            prop_assert!(rel_close(&a.mul(&b).mul(&c3), &a.mul(&b.mul(&c3)), 1e-12));
        }

        #[test]
        fn pointwise_consistency(s in series_strategy(), r in 0.01f64..0.1, ph in 0.0f64..std::f64::consts::TAU) {
            // exp(s) built formally vs exp evaluated pointwise
            let e = s.exp().unwrap();
            let z = Complex64::from_polar(r, ph);
            let exact = s.eval(z).exp();
            let bound = 1e3 * r.powi(N as i32 + 1) * exact.norm();
            prop_assert!((e.eval(z) - exact).norm() <= bound + 1e-14 * exact.norm());
        }
    }
}
