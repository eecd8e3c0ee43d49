//! Harmonic oscillator, ħ = m = ω = 1, coordinate y.

use super::{c64, Class, KernelBuilder, ModelDescriptor, ModelKind};
use crate::error::{Error, Result};
use crate::jetseries::{ComplexSeries, Exponent};
use crate::special::{factorial, hermite_weierstrass, RealPolynomial};
use crate::wavefunction::{Provenance, WaveFunctionTable};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const MASLOV: u32 = 2;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Harmonic;

impl Harmonic {
    pub fn potential(y: f64) -> f64 {
        0.5 * y * y
    }

    pub fn energy(n: usize) -> f64 {
        n as f64 + 0.5
    }

    fn prefactor(class: Class, y: f64) -> f64 {
        let rho = class.rho() as i32;
        2f64.powf(0.5 + rho as f64) * (-0.5 * y * y).exp() * y.powi(rho)
    }

    fn sigma(class: Class) -> Exponent {
        Exponent::from_quarters(1 + 2 * class.rho() as i32)
    }

    /// Kernel expanded directly from its closed form:
    /// `2^(1/2+ρ) e^(−y²/2) y^ρ (1+z)^(−(1/2+ρ)) exp[y² z/(1+z)]`, times `z^(1/4+ρ/2)`.
    pub fn kernel_series(class: Class, y: f64, order: usize) -> Result<ComplexSeries> {
        let rho = class.rho() as f64;
        let one_plus_z = ComplexSeries::polynomial(vec![c64(1.0), c64(1.0)], order);
        let damping = one_plus_z.powr(-(0.5 + rho))?;
        let ratio = ComplexSeries::monomial(Exponent::integer(1), order).mul(&one_plus_z.inv()?);
        let gauss = ratio.scale_real(y * y).exp()?;
        Ok(damping
            .mul(&gauss)
            .scale_real(Self::prefactor(class, y))
            .shift(Self::sigma(class)))
    }

    /// Kernel built coefficient by coefficient from the operator identity
    /// `c_m = 2^(1/2+ρ) e^(−y²/2) W[y^(2m+ρ)] / m!`, `W = exp(−∂²/4)`.
    pub fn operator_kernel_series(class: Class, y: f64, order: usize) -> Result<ComplexSeries> {
        let rho = class.rho();
        let pref = 2f64.powf(0.5 + rho as f64) * (-0.5 * y * y).exp();
        let coeffs = (0..=order)
            .map(|m| {
                let w = hermite_weierstrass(&RealPolynomial::monomial(2 * m + rho, 1.0));
                c64(pref * w.eval(y) / factorial(m))
            })
            .collect();
        Ok(ComplexSeries::new(Self::sigma(class), coeffs))
    }

    /// Normalized eigenfunction `π^(−1/4) (2^n n!)^(−1/2) H_n(y) e^(−y²/2)`,
    /// evaluated by the stable three-term recurrence.
    pub fn exact_value(n: usize, y: f64) -> f64 {
        let mut prev = 0.0;
        let mut cur = PI.powf(-0.25) * (-0.5 * y * y).exp();
        for k in 0..n {
            let kf = k as f64;
            let next = (2.0 / (kf + 1.0)).sqrt() * y * cur - (kf / (kf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    pub fn exact(n: usize, coords: &[f64]) -> Result<WaveFunctionTable> {
        WaveFunctionTable::from_fn(n, Provenance::Exact, coords, |y| Ok(Self::exact_value(n, y)))
    }
}

impl KernelBuilder for Harmonic {
    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor { kind: ModelKind::Harmonic, maslov: MASLOV, classes: Class::all(), coupling: None }
    }

    fn kernel_series(&self, class: Class, y: f64, order: usize) -> Result<ComplexSeries> {
        Self::kernel_series(class, y, order)
    }

    fn stripped_kernel(&self, class: Class, y: f64, z: Complex64) -> Result<Complex64> {
        let one_plus_z = 1.0 + z;
        if one_plus_z.norm() == 0.0 {
            return Err(Error::Domain("harmonic kernel is singular at z = −1".into()));
        }
        let rho = class.rho() as f64;
        Ok(Self::prefactor(class, y)
            * one_plus_z.powf(-(0.5 + rho))
            * (y * y * z / one_plus_z).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::hermite;

    #[test]
    fn both_routes_agree() {
        for class in Class::all() {
            for &y in &[-2.3, -0.7, 0.0, 0.4, 1.9] {
                let a = Harmonic::kernel_series(class, y, 10).unwrap();
                let b = Harmonic::operator_kernel_series(class, y, 10).unwrap();
                if class == Class::Odd && y == 0.0 {
                    assert!(a.is_zero() && b.is_zero());
                    continue;
                }
                assert_eq!(a.sigma(), b.sigma());
                let scale = b.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
                for m in 0..=10 {
                    let d = (a.coefficient(m).unwrap() - b.coefficient(m).unwrap()).norm();
                    assert!(d <= 1e-12 * scale, "class {class:?} y {y} m {m}: {d:e}");
                }
            }
        }
    }

    #[test]
    fn coefficients_are_hermite_functions() {
        let y = 0.83;
        for n in 0..12 {
            let class = Class::of(n);
            let m = n / 2;
            let s = Harmonic::kernel_series(class, y, m).unwrap();
            let got = s.coefficient(m).unwrap().re * factorial(m);
            let expected = 2f64.powf(0.5 + class.rho() as f64 - n as f64)
                * hermite(n, y)
                * (-0.5 * y * y).exp();
            assert!((got - expected).abs() < 1e-12 * expected.abs().max(1e-3), "n {n}");
        }
    }

    #[test]
    fn exact_states_are_orthonormal() {
        let rule = crate::quadrature::gauss_legendre(200).unwrap().mapped(-12.0, 12.0);
        for a in 0..8 {
            for b in 0..8 {
                let v = rule.integrate(|y| Harmonic::exact_value(a, y) * Harmonic::exact_value(b, y));
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((v - e).abs() < 1e-12, "{a} {b} {v}");
            }
        }
        let direct = PI.powf(-0.25) / (2f64.powi(5) * factorial(5)).sqrt() * hermite(5, 1.1) * (-0.605f64).exp();
        assert!((Harmonic::exact_value(5, 1.1) - direct).abs() < 1e-14);
    }

    #[test]
    fn pointwise_kernel_matches_series() {
        for class in Class::all() {
            let s = Harmonic::kernel_series(class, 0.9, 30).unwrap();
            let stripped = s.shift(-s.sigma());
            let z = Complex64::from_polar(0.2, 0.7);
            let a = stripped.eval(z);
            let b = Harmonic.stripped_kernel(class, 0.9, z).unwrap();
            assert!((a - b).norm() < 1e-13 * b.norm());
        }
    }

    #[test]
    fn coefficient_parity_in_y() {
        for class in Class::all() {
            let sign = if class == Class::Even { 1.0 } else { -1.0 };
            for &y in &[0.3, 1.1, 2.7] {
                let a = Harmonic::kernel_series(class, y, 6).unwrap();
                let b = Harmonic::kernel_series(class, -y, 6).unwrap();
                for m in 0..=6 {
                    let (ca, cb) = (a.coefficient(m).unwrap(), b.coefficient(m).unwrap());
                    assert!((ca - cb * sign).norm() <= 1e-14 * ca.norm().max(1e-300), "{class:?} y {y} m {m}");
                }
            }
        }
    }
}
