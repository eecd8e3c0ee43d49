//! Pöschl-Teller oscillator `V(q) = (Λ²/2) tan² q` on |q| < π/2
//! (ħ = m = 1, well width a = π, so x = sin q and V₀ = Λ²/2).

use super::{c64, Class, KernelBuilder, ModelDescriptor, ModelKind};
use crate::error::{Error, Result};
use crate::jetseries::{Branch, ComplexSeries, Exponent, PolySeries};
use crate::jetseries::{Coefficient, ComplexPolynomial};
use crate::special::{factorial, gegenbauer, gegenbauer_norm_sq, RealPolynomial};
use crate::wavefunction::{Provenance, WaveFunctionTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

pub const MASLOV: u32 = 2;

/// Tolerance on imaginary round-off when reading back real polynomials.
const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoschlTeller {
    /// Λ = J_s/ħ
    pub lambda: f64,
}

/// `P_m^(ρ)(x)`: the literal m-th z-derivative at z = 0, including 2^(−Λ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtPolynomial {
    pub class: Class,
    pub m: usize,
    pub poly: RealPolynomial,
}

impl PtPolynomial {
    pub fn state(&self) -> usize {
        self.class.state(self.m)
    }
}

fn coords(q: f64) -> Result<(f64, f64)> {
    if !(q.abs() < FRAC_PI_2) {
        return Err(Error::Domain(format!("q = {q} lies outside the well |q| < π/2")));
    }
    Ok((q.sin(), q.cos()))
}

impl PoschlTeller {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidInput(format!("Λ must be positive, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn v0(&self) -> f64 {
        0.5 * self.lambda * self.lambda
    }

    pub fn potential(&self, q: f64) -> f64 {
        self.v0() * q.tan().powi(2)
    }

    /// `s = Λ′ + 1/2` with `Λ′ = √(Λ² + 1/4)`; `s(s − 1) = Λ²`.
    pub fn exact_exponent(&self) -> f64 {
        (self.lambda * self.lambda + 0.25).sqrt() + 0.5
    }

    pub fn exact_energy(&self, n: usize) -> f64 {
        let s = self.exact_exponent();
        0.5 * ((n as f64 + s).powi(2) - self.lambda * self.lambda)
    }

    /// Generating function `F = iΛ ln{[√((1−z)² + 4c²z) + 1 − z]/(2c)}`,
    /// `z = e^(−2iθ)`, principal branches. Real for real θ inside the
    /// turning circle.
    pub fn generating_function(&self, q: f64, theta: Complex64) -> Result<Complex64> {
        let (_, c) = coords(q)?;
        let z = (Complex64::new(0.0, -2.0) * theta).exp();
        let one_minus_z = 1.0 - z;
        let radicand = one_minus_z * one_minus_z + 4.0 * c * c * z;
        let bracket = (radicand.sqrt() + one_minus_z) / (2.0 * c);
        if bracket.norm() == 0.0 {
            return Err(Error::Domain("generating function logarithm of zero".into()));
        }
        Ok(Complex64::new(0.0, self.lambda) * bracket.ln())
    }

    fn ratio(q: f64, theta: f64) -> Result<(f64, f64, f64)> {
        let (x, c) = coords(q)?;
        let ct = theta.cos();
        if !(x.abs() < ct.abs()) {
            return Err(Error::Domain(format!(
                "|sin q| = {} is not below |cos θ| = {} (turning circle)",
                x.abs(),
                ct.abs()
            )));
        }
        Ok((x, c, x / ct))
    }

    /// `J(q,θ) = Λ{(1 − [x/cos θ]²)^(−1/2) − 1}`
    pub fn action(&self, q: f64, theta: f64) -> Result<f64> {
        let (_, _, r) = Self::ratio(q, theta)?;
        Ok(self.lambda * ((1.0 - r * r).powf(-0.5) - 1.0))
    }

    /// `∂²F/∂q∂θ = −Λ cos q (sin q / cos²θ) {1 − [x/cos θ]²}^(−3/2)`
    pub fn mixed_second_derivative(&self, q: f64, theta: f64) -> Result<f64> {
        let (x, c, r) = Self::ratio(q, theta)?;
        let ct = theta.cos();
        Ok(-self.lambda * c * x / (ct * ct) * (1.0 - r * r).powf(-1.5))
    }

    /// Transformation-theory prefactor `[−(1/2πi) ∂²F/∂q∂θ]^(1/2)`.
    pub fn unitary_prefactor(&self, q: f64, theta: f64) -> Result<Complex64> {
        let d2 = self.mixed_second_derivative(q, theta)?;
        Ok((Complex64::new(0.0, 1.0) * d2 / (2.0 * PI)).sqrt())
    }

    /// Parity prefactor `cos^(1/2) q · sin^ρ q / cos^(1/2+ρ) θ`.
    pub fn class_prefactor(&self, q: f64, theta: f64, class: Class) -> Result<f64> {
        let (x, c, _) = Self::ratio(q, theta)?;
        let ct = theta.cos();
        if ct <= 0.0 {
            return Err(Error::Domain(format!("cos θ = {ct} must be positive for a real prefactor")));
        }
        let rho = class.rho() as i32;
        Ok(c.sqrt() * x.powi(rho) / ct.powf(0.5 + rho as f64))
    }

    /// `P_m^(ρ)(x) = x^ρ d^m/dz^m [(1+z)^(−(1/2+ρ)) (1 − z + √((1+z)² − 4x²z))^(−Λ)]` at z = 0,
    /// computed exactly over the polynomial ring in x.
    pub fn polynomial(&self, m: usize, class: Class) -> Result<PtPolynomial> {
        let rho = class.rho();
        let scalar = |v: f64| ComplexPolynomial::from_scalar(c64(v));
        let one_plus_z = PolySeries::polynomial(vec![scalar(1.0), scalar(1.0)], m);
        let damping = one_plus_z.powr(-(0.5 + rho as f64))?;
        // (1+z)² − 4x²z = 1 + (2 − 4x²) z + z²
        let linear = ComplexPolynomial::new(vec![c64(2.0), c64(0.0), c64(-4.0)]);
        let radicand = PolySeries::polynomial(vec![scalar(1.0), linear, scalar(1.0)], m);
        let root = radicand.sqrt(Branch::Principal)?;
        // (1 − z + √D)/2 has constant term 1; its −Λ power carries the 2^(−Λ) split off.
        let half_bracket = root
            .add(&PolySeries::polynomial(vec![scalar(1.0), scalar(-1.0)], m))?
            .scale_real(0.5);
        let body = damping.mul(&half_bracket.powr(-self.lambda)?);
        let coeff = body.coefficient(m)?.clone();
        let poly = coeff
            .scale(c64(factorial(m) * 2f64.powf(-self.lambda)))
            .to_real(REAL_TOL)?
            .shift(rho);
        Ok(PtPolynomial { class, m, poly })
    }

    /// `cos^(Λ+1/2) q · P_m^(ρ)(sin q)`, unnormalized.
    pub fn nonorthogonal_value(&self, p: &PtPolynomial, q: f64) -> Result<f64> {
        let (x, c) = coords_closed(q)?;
        Ok(c.powf(self.lambda + 0.5) * p.poly.eval(x))
    }

    pub fn nonorthogonal(&self, n: usize, coords: &[f64]) -> Result<WaveFunctionTable> {
        let p = self.polynomial(n / 2, Class::of(n))?;
        WaveFunctionTable::from_fn(n, Provenance::Nonorthogonal, coords, |q| {
            self.nonorthogonal_value(&p, q)
        })
    }

    /// Normalized eigenfunction `N cos^s q · C_n^(s)(sin q)`, `s = √(Λ²+1/4) + 1/2`.
    pub fn exact_value(&self, n: usize, q: f64) -> Result<f64> {
        let (x, c) = coords_closed(q)?;
        let s = self.exact_exponent();
        let norm = gegenbauer_norm_sq(n, s)?.sqrt();
        Ok(c.powf(s) * gegenbauer(n, s, x) / norm)
    }

    pub fn exact(&self, n: usize, coords: &[f64]) -> Result<WaveFunctionTable> {
        WaveFunctionTable::from_fn(n, Provenance::Exact, coords, |q| self.exact_value(n, q))
    }

    fn kernel_prefactor(&self, class: Class, x: f64, c: f64) -> f64 {
        let rho = class.rho() as i32;
        2f64.powf(0.5 + rho as f64) * c.sqrt() * x.powi(rho)
    }
}

/// Like [`coords`] but admits the closed well edges, where states vanish.
fn coords_closed(q: f64) -> Result<(f64, f64)> {
    if q.abs() > FRAC_PI_2 + 1e-12 {
        return Err(Error::Domain(format!("q = {q} lies outside the well |q| ≤ π/2")));
    }
    Ok((q.sin(), q.cos().max(0.0)))
}

impl KernelBuilder for PoschlTeller {
    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor {
            kind: ModelKind::PoschlTeller,
            maslov: MASLOV,
            classes: Class::all(),
            coupling: Some(self.lambda),
        }
    }

    /// `A_ρ e^(iF)` written in z: `2^(1/2+ρ) c^(1/2) x^ρ (1+z)^(−(1/2+ρ)) exp(−Λ ln bracket) z^(1/4+ρ/2)`.
    fn kernel_series(&self, class: Class, q: f64, order: usize) -> Result<ComplexSeries> {
        let (x, c) = coords(q)?;
        let rho = class.rho();
        let one_plus_z = ComplexSeries::polynomial(vec![c64(1.0), c64(1.0)], order);
        let damping = one_plus_z.powr(-(0.5 + rho as f64))?;
        let radicand =
            ComplexSeries::polynomial(vec![c64(1.0), c64(2.0 - 4.0 * x * x), c64(1.0)], order);
        let bracket = radicand
            .sqrt(Branch::Principal)?
            .add(&ComplexSeries::polynomial(vec![c64(1.0), c64(-1.0)], order))?
            .scale_real(0.5 / c);
        let phase = bracket.log()?.scale_real(-self.lambda).exp()?;
        Ok(damping
            .mul(&phase)
            .scale_real(self.kernel_prefactor(class, x, c))
            .shift(Exponent::from_quarters(1 + 2 * rho as i32)))
    }

    fn stripped_kernel(&self, class: Class, q: f64, z: Complex64) -> Result<Complex64> {
        let (x, c) = coords(q)?;
        let rho = class.rho() as f64;
        let one_plus_z = 1.0 + z;
        let radicand = one_plus_z * one_plus_z - 4.0 * x * x * z;
        let bracket = (radicand.sqrt() + 1.0 - z) / (2.0 * c);
        if bracket.norm() == 0.0 || one_plus_z.norm() == 0.0 {
            return Err(Error::Domain("kernel singular at this z".into()));
        }
        Ok(self.kernel_prefactor(class, x, c)
            * one_plus_z.powf(-(0.5 + rho))
            * (-self.lambda * bracket.ln()).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(l: f64) -> PoschlTeller {
        PoschlTeller::new(l).unwrap()
    }

    #[test]
    fn generating_function_trivial_points() {
        let p = pt(7.0);
        for &q in &[-1.2, -0.3, 0.5, 1.1] {
            assert!(p.generating_function(q, c64(0.0)).unwrap().norm() < 1e-13);
        }
        for &t in &[-0.9, 0.2, 1.3] {
            assert!(p.generating_function(0.0, c64(t)).unwrap().norm() < 1e-13);
        }
        assert!(p.generating_function(FRAC_PI_2, c64(0.1)).is_err());
        let f = p.generating_function(0.5f64.asin(), c64(0.7)).unwrap();
        assert!(f.im.abs() < 1e-13);
    }

    #[test]
    fn action_values_and_domain() {
        let p = pt(4.0);
        assert_eq!(p.action(0.0, 0.4).unwrap(), 0.0);
        let q = 0.6f64.asin();
        assert!((p.action(q, 0.0).unwrap() - 0.25 * 4.0).abs() < 1e-14);
        assert!(p.action(0.9f64.asin(), 1.2).is_err());
    }

    #[test]
    fn small_q_limit() {
        let p = pt(3.0);
        for &theta in &[0.2, 0.9] {
            for &q in &[1e-3 * PI, 1e-4 * PI] {
                let v = p.mixed_second_derivative(q, theta).unwrap() / (p.lambda * q);
                let target = -1.0 / theta.cos().powi(2);
                assert!((v - target).abs() < 1e-4 * target.abs(), "θ {theta} q {q}: {v}");
            }
        }
        let a = p.class_prefactor(0.0, 0.6, Class::Even).unwrap();
        assert!((a - 1.0 / 0.6f64.cos().sqrt()).abs() < 1e-15);
        assert_eq!(p.class_prefactor(0.0, 0.6, Class::Odd).unwrap(), 0.0);
    }

    #[test]
    fn low_order_polynomials() {
        for &l in &[1.0, 2.5, 10.0] {
            let p = pt(l);
            let s = 2f64.powf(-l);
            let p00 = p.polynomial(0, Class::Even).unwrap().poly;
            assert_eq!(p00.degree(), 0);
            assert!((p00.coeff(0) - s).abs() < 1e-15 * s);
            let p01 = p.polynomial(0, Class::Odd).unwrap().poly;
            assert_eq!(p01.degree(), 1);
            assert_eq!(p01.coeff(0), 0.0);
            assert!((p01.coeff(1) - s).abs() < 1e-15 * s);
            let p10 = p.polynomial(1, Class::Even).unwrap().poly;
            assert!((p10.coeff(0) + 0.5 * s).abs() < 1e-14 * s);
            assert_eq!(p10.coeff(1), 0.0);
            assert!((p10.coeff(2) - l * s).abs() < 1e-13 * s);
        }
    }

    #[test]
    fn nonorthogonal_leading_ratio() {
        let p = pt(10.0).polynomial(1, Class::Even).unwrap().poly;
        assert!((p.coeff(2) / p.coeff(0) + 20.0).abs() < 1e-12);
    }

    #[test]
    fn parity_slots_are_exactly_zero() {
        let p = pt(10.0);
        for n in 0..=10 {
            let poly = p.polynomial(n / 2, Class::of(n)).unwrap();
            assert_eq!(poly.poly.degree(), n);
            for (k, &c) in poly.poly.coeffs().iter().enumerate() {
                if (k + n) % 2 == 1 {
                    assert_eq!(c, 0.0, "n {n} slot {k}");
                } else {
                    assert!(c != 0.0);
                }
            }
        }
    }

    #[test]
    fn exact_exponent_relation() {
        for &l in &[0.5, 3.0, 10.0, 40.0] {
            let s = pt(l).exact_exponent();
            assert!((s * (s - 1.0) - l * l).abs() < 1e-12 * l * l);
        }
        assert_eq!(pt(10.0).exact_value(1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn exact_states_are_orthonormal_in_q() {
        let p = pt(5.0);
        let rule = crate::quadrature::gauss_legendre(160).unwrap().mapped(-FRAC_PI_2, FRAC_PI_2);
        for a in 0..6 {
            for b in 0..=a {
                let v = rule.integrate(|q| p.exact_value(a, q).unwrap() * p.exact_value(b, q).unwrap());
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((v - e).abs() < 1e-11, "{a} {b}: {v}");
            }
        }
    }

    #[test]
    fn kernel_series_matches_polynomials() {
        let p = pt(10.0);
        let q = 0.37;
        for n in 0..=8 {
            let class = Class::of(n);
            let m = n / 2;
            let series = p.kernel_series(class, q, m).unwrap();
            assert_eq!(series.sigma(), Exponent::from_quarters(1 + 2 * class.rho() as i32));
            let via_kernel = series.coefficient(m).unwrap().re * factorial(m);
            let poly = p.polynomial(m, class).unwrap();
            let closed = p.nonorthogonal_value(&poly, q).unwrap()
                * 2f64.powf(0.5 + class.rho() as f64 + p.lambda);
            assert!((via_kernel - closed).abs() < 1e-11 * closed.abs(), "n {n}");
        }
    }

    #[test]
    fn pointwise_kernel_matches_series() {
        let p = pt(6.0);
        for class in Class::all() {
            let s = p.kernel_series(class, -0.8, 40).unwrap();
            let z = Complex64::from_polar(0.1, 2.1);
            let a = s.shift(-s.sigma()).eval(z);
            let b = p.stripped_kernel(class, -0.8, z).unwrap();
            assert!((a - b).norm() < 1e-12 * b.norm());
        }
    }

    /// Pairs (q, θ) sharing r = sin q / cos θ.
    fn same_ratio_pairs(r: f64) -> Vec<(f64, f64)> {
        [0.15, 0.5, 0.9, 1.2]
            .iter()
            .map(|&th: &f64| ((r * th.cos()).asin(), th))
            .collect()
    }

    #[test]
    fn mixed_derivative_factorizes_through_ratio() {
        let p = pt(7.0);
        for &r in &[0.1, 0.45, 0.8] {
            let vals: Vec<f64> = same_ratio_pairs(r)
                .into_iter()
                .map(|(q, th)| {
                    let d2 = p.mixed_second_derivative(q, th).unwrap();
                    d2 * th.cos().powi(2) / (q.cos() * q.sin())
                })
                .collect();
            for v in &vals {
                assert!((v - vals[0]).abs() < 1e-12 * vals[0].abs(), "r {r}: {vals:?}");
            }
        }
    }

    #[test]
    fn class_prefactor_over_unitary_depends_only_on_action() {
        let p = pt(7.0);
        for &r in &[0.2, 0.6] {
            let pairs = same_ratio_pairs(r);
            let j0 = p.action(pairs[0].0, pairs[0].1).unwrap();
            let ratio = |(q, th): (f64, f64)| {
                p.class_prefactor(q, th, Class::Even).unwrap() / p.unitary_prefactor(q, th).unwrap().norm()
            };
            let base = ratio(pairs[0]);
            for &pair in &pairs[1..] {
                assert!((p.action(pair.0, pair.1).unwrap() - j0).abs() < 1e-12 * j0);
                assert!((ratio(pair) - base).abs() < 1e-12 * base, "r {r}");
            }
        }
    }

    proptest! {
        #[test]
        fn polynomial_parity(m in 0usize..6, odd in proptest::bool::ANY, x in -1.0f64..1.0, l in 0.5f64..30.0) {
            let class = if odd { Class::Odd } else { Class::Even };
            let p = pt(l).polynomial(m, class).unwrap().poly;
            let sign = if odd { -1.0 } else { 1.0 };
            let (a, b) = (p.eval(x), p.eval(-x));
            prop_assert!((a - sign * b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }
}
