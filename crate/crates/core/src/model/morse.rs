//! Morse oscillator `V(q) = (Λ̃²/2)(1 − e^(−q))²` (ħ = m = d = 1, Λ̃ = √(2D)),
//! written in `u = e^(−q)`.

use super::{c64, Class, KernelBuilder, ModelDescriptor, ModelKind};
use crate::error::{Error, Result};
use crate::jetseries::{Branch, ComplexSeries, Exponent};
use crate::special::{factorial, laguerre, log_gamma, RealPolynomial};
use crate::wavefunction::{Provenance, WaveFunctionTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

pub const MASLOV: u32 = 2;

/// Interpolation interval for P̃_n in u.
pub const POLY_NODES_LO: f64 = 0.2;
pub const POLY_NODES_HI: f64 = 1.8;
pub const POLY_VALIDATION_NODES: usize = 8;
pub const POLY_VALIDATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Morse {
    /// Λ̃ = J̃_s/ħ
    pub lambda: f64,
}

/// `u^base · e^(−decay·u) · poly(u)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseFunction {
    pub base: f64,
    pub decay: f64,
    pub poly: RealPolynomial,
}

impl MorseFunction {
    pub fn eval_u(&self, u: f64) -> f64 {
        u.powf(self.base) * (-self.decay * u).exp() * self.poly.eval(u)
    }

    pub fn eval_q(&self, q: f64) -> f64 {
        self.eval_u((-q).exp())
    }

    /// Rewrites with a smaller base exponent; the difference must be a whole number.
    pub fn rebased(&self, base: f64) -> Result<Self> {
        let shift = self.base - base;
        let k = shift.round();
        if (shift - k).abs() > 1e-9 || k < 0.0 {
            return Err(Error::InvalidInput(format!(
                "cannot rebase u^{} onto u^{}",
                self.base, base
            )));
        }
        Ok(Self { base, decay: self.decay, poly: self.poly.shift(k as usize) })
    }
}

/// Interpolated `P̃_n(u)` with its validation residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorsePolynomial {
    pub n: usize,
    pub poly: RealPolynomial,
    pub residual: f64,
}

/// Positive root `λ = [−u cos θ + √(u² cos²θ + 4(1 − u))]/2` of
/// `λ² + u λ cos θ + u − 1 = 0`.
pub fn lambda_root(u: f64, cos_theta: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("u = {u} must be positive")));
    }
    let radicand = u * u * cos_theta * cos_theta + 4.0 * (1.0 - u);
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "negative radicand {radicand:e} for u = {u}, cos θ = {cos_theta}"
        )));
    }
    let lam = 0.5 * (-u * cos_theta + radicand.sqrt());
    if lam < 0.0 {
        return Err(Error::Domain(format!("no nonnegative root for u = {u}, cos θ = {cos_theta}")));
    }
    Ok(lam)
}

impl Morse {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.5) || !lambda.is_finite() {
            return Err(Error::InvalidInput(format!("Λ̃ must exceed 1/2, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    /// Number of bound states: n is bound iff n < Λ̃ − 1/2.
    pub fn bound_states(&self) -> usize {
        let top = self.lambda - 0.5;
        let floor = top.floor();
        if floor == top { floor as usize } else { floor as usize + 1 }
    }

    pub fn check_bound(&self, n: usize) -> Result<()> {
        if (n as f64) < self.lambda - 0.5 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "n = {n} exceeds bound-state count Λ̃−1/2 = {}",
                self.lambda - 0.5
            )))
        }
    }

    pub fn potential(&self, q: f64) -> f64 {
        0.5 * self.lambda * self.lambda * (1.0 - (-q).exp()).powi(2)
    }

    pub fn exact_energy(&self, n: usize) -> f64 {
        let k = n as f64 + 0.5;
        self.lambda * k * (1.0 - k / (2.0 * self.lambda))
    }

    /// `F = Λ̃{√(λ² − (1−u)²) + Arccos[(1−u)/λ] − θ}` for 0 < θ < π.
    pub fn generating_function(&self, q: f64, theta: f64) -> Result<f64> {
        let (u, lam, w) = Self::allowed(q, theta)?;
        let _ = u;
        let arccos = if lam == 0.0 { FRAC_PI_2 } else { (w / lam).clamp(-1.0, 1.0).acos() };
        Ok(self.lambda * ((lam * lam - w * w).max(0.0).sqrt() + arccos - theta))
    }

    /// `J = Λ̃(1 − √(1 − λ²))`
    pub fn action(&self, q: f64, theta: f64) -> Result<f64> {
        let (_, lam, _) = Self::allowed(q, theta)?;
        Ok(self.lambda * (1.0 - (1.0 - lam * lam).sqrt()))
    }

    fn allowed(q: f64, theta: f64) -> Result<(f64, f64, f64)> {
        if !(theta > 0.0 && theta < PI) {
            return Err(Error::Domain(format!("θ = {theta} must lie in (0, π)")));
        }
        let u = (-q).exp();
        let lam = lambda_root(u, theta.cos())?;
        let w = 1.0 - u;
        if lam < w.abs() * (1.0 - 1e-14) {
            return Err(Error::Domain(format!(
                "classically forbidden: λ = {lam} < |1 − u| = {}",
                w.abs()
            )));
        }
        Ok((u, lam, w))
    }

    /// `exp(iF)` from the closed form.
    pub fn phase_closed(&self, q: f64, theta: f64) -> Result<Complex64> {
        Ok(Complex64::new(0.0, self.generating_function(q, theta)?).exp())
    }

    /// `exp(iF)` from the reformulated product
    /// `e^(−iΛ̃θ) e^(Λ̃T) [((1−u) + T)/λ]^Λ̃`, `T = √((1−u)² − λ²)`, principal
    /// branches. `Branch::Alternative` negates T.
    pub fn phase_reformulated(&self, q: f64, theta: f64, branch: Branch) -> Result<Complex64> {
        let (_, lam, w) = Self::allowed(q, theta)?;
        if lam == 0.0 {
            return Err(Error::Domain("reformulated phase needs λ > 0".into()));
        }
        let mut t = c64(w * w - lam * lam).sqrt();
        if branch == Branch::Alternative {
            t = -t;
        }
        let ratio = (w + t) / lam;
        Ok(Complex64::new(0.0, -self.lambda * theta).exp()
            * (self.lambda * t).exp()
            * ratio.powf(self.lambda))
    }

    /// Distance from z = 0 to the nearest singularity of the class kernels at u.
    pub fn singularity_radius(u: f64) -> f64 {
        // roots of u²z² + (2u² + 16(1−u))z + u²
        let b = c64(2.0 * u * u + 16.0 * (1.0 - u));
        let a = u * u;
        let disc = (b * b - 4.0 * a * a).sqrt();
        let r1 = ((-b + disc) / (2.0 * a)).norm();
        let r2 = ((-b - disc) / (2.0 * a)).norm();
        r1.min(r2).min(1.0)
    }

    fn sigma(class: Class) -> Exponent {
        Exponent::from_quarters(1 + 2 * class.rho() as i32)
    }

    /// Class kernel in z at fixed u, from
    /// `(D/4)^(−1/4) ((1−u)Λ₁)^ρ e^(Λ̃(1−u)S) ((1+S)/Λ₁)^Λ̃ z^(1/4+ρ/2)` with
    /// `D = u²(1+z)² + 16z(1−u)`, `Λ₁ = 4/(√D + u(1+z))` (so `λ = (1−u) z^(1/2) Λ₁`)
    /// and `S = √(1 − zΛ₁²)`, `S(0) = 1` (so `T = (1−u)S`).
    pub fn kernel_series_u(&self, class: Class, u: f64, order: usize) -> Result<ComplexSeries> {
        if !(u > 0.0) {
            return Err(Error::Domain(format!("u = {u} must be positive")));
        }
        let w = 1.0 - u;
        let big_d = ComplexSeries::polynomial(
            vec![c64(u * u), c64(2.0 * u * u + 16.0 * w), c64(u * u)],
            order,
        );
        let root_d = big_d.sqrt(Branch::Principal)?;
        let denom = root_d.add(&ComplexSeries::polynomial(vec![c64(u), c64(u)], order))?;
        let lam1 = denom.inv()?.scale_real(4.0);
        let z = ComplexSeries::monomial(Exponent::integer(1), order);
        let s = ComplexSeries::one(order)
            .sub(&z.mul(&lam1).mul(&lam1))?
            .sqrt(Branch::Principal)?;
        let one_plus_s = s.add(&ComplexSeries::one(order))?;
        let ratio = one_plus_s.mul(&denom).scale_real(0.25);
        let mut body = big_d
            .scale_real(0.25)
            .powr(-0.25)?
            .mul(&s.scale_real(self.lambda * w).exp()?)
            .mul(&ratio.powr(self.lambda)?);
        if class == Class::Odd {
            body = body.mul(&lam1.scale_real(w));
        }
        Ok(body.shift(Self::sigma(class)))
    }

    /// Pointwise counterpart of [`Morse::kernel_series_u`] with z^σ removed.
    pub fn stripped_kernel_u(&self, class: Class, u: f64, z: Complex64) -> Result<Complex64> {
        let w = 1.0 - u;
        let one_plus_z = 1.0 + z;
        let uz = u * one_plus_z;
        // √D written as u(1+z)·√(1 + 16z(1−u)/(u(1+z))²) to stay on the branch continued from z = 0
        let root_d = uz * (1.0 + 16.0 * z * w / (uz * uz)).sqrt();
        let denom = root_d + uz;
        let lam1 = 4.0 / denom;
        let s = (1.0 - z * lam1 * lam1).sqrt();
        let quarter_d = 0.25 * root_d * root_d;
        // (D/4)^(−1/4) = (u(1+z)/2)^(−1/2) · (1 + …)^(−1/4)
        let pre = (0.5 * uz).powf(-0.5) * (quarter_d / (0.25 * uz * uz)).powf(-0.25);
        let ratio = 0.25 * (1.0 + s) * denom;
        let mut v = pre * (self.lambda * w * s).exp() * u.powf(self.lambda) * (ratio / u).powf(self.lambda);
        if class == Class::Odd {
            v *= w * lam1;
        }
        Ok(v)
    }

    /// Interpolates `P̃_n(u) = ψ̃_n / (u^(Λ̃−n−1/2) e^(−Λ̃u))` from the synthesized
    /// coefficient at Chebyshev nodes in [0.2, 1.8], then validates at extra nodes.
    pub fn polynomial(&self, n: usize) -> Result<MorsePolynomial> {
        self.check_bound(n)?;
        let class = Class::of(n);
        let m = n / 2;
        let mid = 0.5 * (POLY_NODES_LO + POLY_NODES_HI);
        let half = 0.5 * (POLY_NODES_HI - POLY_NODES_LO);
        let base = self.lambda - n as f64 - 0.5;
        let sample = |u: f64| -> Result<f64> {
            let c = *self.kernel_series_u(class, u, m)?.coefficient(m)? * factorial(m);
            Ok(c.re / (u.powf(base) * (-self.lambda * u).exp()))
        };
        let nodes: Vec<f64> = (0..=n)
            .map(|j| mid + half * (PI * (2 * j + 1) as f64 / (2 * (n + 1)) as f64).cos())
            .collect();
        let values = crate::par::try_map(&nodes, |&u| sample(u))?;
        let poly = interpolate(&nodes, &values);
        let checks: Vec<f64> = (0..POLY_VALIDATION_NODES)
            .map(|k| POLY_NODES_LO + 2.0 * half * (k as f64 + 0.5) / POLY_VALIDATION_NODES as f64)
            .collect();
        let expected = crate::par::try_map(&checks, |&u| sample(u))?;
        let scale = expected.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let worst = checks
            .iter()
            .zip(&expected)
            .fold(0.0f64, |a, (&u, &v)| a.max((poly.eval(u) - v).abs()));
        let residual = if scale > 0.0 { worst / scale } else { worst };
        if !(residual <= POLY_VALIDATION_TOL) {
            return Err(Error::Validation(format!(
                "P̃_{n} interpolation residual {residual:e} exceeds {POLY_VALIDATION_TOL:e}"
            )));
        }
        Ok(MorsePolynomial { n, poly, residual })
    }

    /// `u^(Λ̃−n−1/2) e^(−Λ̃u) P̃_n(u)`
    pub fn synthesized_function(&self, n: usize) -> Result<MorseFunction> {
        let p = self.polynomial(n)?;
        Ok(MorseFunction { base: self.lambda - n as f64 - 0.5, decay: self.lambda, poly: p.poly })
    }

    /// Exact state as a [`MorseFunction`]:
    /// `N ξ^s e^(−ξ/2) L_n^(2s)(ξ)`, `ξ = 2Λ̃u`, `s = Λ̃ − n − 1/2`, normalized under ∫dq.
    pub fn exact_function(&self, n: usize) -> Result<MorseFunction> {
        self.check_bound(n)?;
        let s = self.lambda - n as f64 - 0.5;
        let alpha = 2.0 * s;
        let xi = 2.0 * self.lambda;
        // L_n^(α)(ξ) = Σ_k (−1)^k C(n+α, n−k) ξ^k / k!
        let coeffs: Vec<f64> = (0..=n)
            .map(|k| {
                let ln_binom = log_gamma(n as f64 + alpha + 1.0).unwrap_or(0.0)
                    - log_gamma(k as f64 + alpha + 1.0).unwrap_or(0.0)
                    - crate::special::log_factorial(n - k);
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * (ln_binom - crate::special::log_factorial(k) + k as f64 * xi.ln()).exp()
            })
            .collect();
        let ln_norm = self.ln_norm(n)? + s * xi.ln();
        Ok(MorseFunction {
            base: s,
            decay: self.lambda,
            poly: RealPolynomial::new(coeffs).scale(ln_norm.exp()),
        })
    }

    /// ln N with N² = n!·2s / Γ(n + 2s + 1)
    fn ln_norm(&self, n: usize) -> Result<f64> {
        let s = self.lambda - n as f64 - 0.5;
        Ok(0.5 * (crate::special::log_factorial(n) + (2.0 * s).ln()
            - log_gamma(n as f64 + 2.0 * s + 1.0)?))
    }

    pub fn exact_value(&self, n: usize, q: f64) -> Result<f64> {
        self.check_bound(n)?;
        let s = self.lambda - n as f64 - 0.5;
        let xi = 2.0 * self.lambda * (-q).exp();
        let l = laguerre(n, 2.0 * s, xi);
        if l == 0.0 {
            return Ok(0.0);
        }
        let ln_mag = self.ln_norm(n)? + s * xi.ln() - 0.5 * xi + l.abs().ln();
        Ok(l.signum() * ln_mag.exp())
    }

    pub fn exact(&self, n: usize, coords: &[f64]) -> Result<WaveFunctionTable> {
        self.check_bound(n)?;
        WaveFunctionTable::from_fn(n, Provenance::Exact, coords, |q| self.exact_value(n, q))
    }
}

/// Newton divided differences, expanded to monomial coefficients.
fn interpolate(nodes: &[f64], values: &[f64]) -> RealPolynomial {
    let n = nodes.len();
    let mut dd = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    let mut poly = RealPolynomial::constant(dd[n - 1]);
    for i in (0..n - 1).rev() {
        // poly·(u − x_i) + dd_i
        poly = &(&poly.shift(1) - &poly.scale(nodes[i])) + &RealPolynomial::constant(dd[i]);
    }
    poly
}

impl KernelBuilder for Morse {
    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor {
            kind: ModelKind::Morse,
            maslov: MASLOV,
            classes: Class::all(),
            coupling: Some(self.lambda),
        }
    }

    fn kernel_series(&self, class: Class, q: f64, order: usize) -> Result<ComplexSeries> {
        self.kernel_series_u(class, (-q).exp(), order)
    }

    fn stripped_kernel(&self, class: Class, q: f64, z: Complex64) -> Result<Complex64> {
        self.stripped_kernel_u(class, (-q).exp(), z)
    }

    fn singularity_radius(&self, q: f64) -> f64 {
        Morse::singularity_radius((-q).exp())
    }
}
