//! Special functions, orthogonal polynomials and closed-form moments.

mod polynomial;

pub use polynomial::RealPolynomial;

use crate::error::{Error, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the series argument away from its poles.
        return Ok(lanczos(x + 1.0) - x.ln());
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut a = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// ln n! for small integers.
pub fn log_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Gegenbauer polynomial C_n^(α)(x) by three-term recurrence.
pub fn gegenbauer(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * alpha * x;
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 * x * (kf + alpha - 1.0) * cur - (kf + 2.0 * alpha - 2.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficient form of C_n^(α).
pub fn gegenbauer_poly(n: usize, alpha: f64) -> RealPolynomial {
    let mut prev = RealPolynomial::constant(1.0);
    if n == 0 {
        return prev;
    }
    let mut cur = RealPolynomial::monomial(1, 2.0 * alpha);
    for k in 2..=n {
        let kf = k as f64;
        let next = cur
            .shift(1)
            .scale(2.0 * (kf + alpha - 1.0) / kf)
            .axpy(-(kf + 2.0 * alpha - 2.0) / kf, &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// ∫_{-1}^{1} [C_n^(α)]² (1 − x²)^(α − 1/2) dx.
pub fn gegenbauer_norm_sq(n: usize, alpha: f64) -> Result<f64> {
    let nf = n as f64;
    let log = (1.0 - 2.0 * alpha) * 2f64.ln() + log_gamma(nf + 2.0 * alpha)?
        - log_factorial(n)
        - (nf + alpha).ln()
        - 2.0 * log_gamma(alpha)?;
    Ok(PI * log.exp())
}

/// Physicists' Hermite polynomial H_n(y).
pub fn hermite(n: usize, y: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * y;
    for k in 1..n {
        let next = 2.0 * y * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn hermite_poly(n: usize) -> RealPolynomial {
    let mut prev = RealPolynomial::constant(1.0);
    if n == 0 {
        return prev;
    }
    let mut cur = RealPolynomial::monomial(1, 2.0);
    for k in 1..n {
        let next = cur.shift(1).scale(2.0).axpy(-2.0 * k as f64, &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Generalized Laguerre polynomial L_n^(α)(x).
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// M_k(Λ) = ∫_{-1}^{1} x^k (1 − x²)^Λ dx = B((k + 1)/2, Λ + 1); zero for odd k.
pub fn weight_moment(k: usize, lambda: f64) -> Result<f64> {
    if lambda <= -1.0 {
        return Err(Error::Domain(format!("weight exponent {lambda} must exceed -1")));
    }
    if k % 2 == 1 {
        return Ok(0.0);
    }
    let a = (k as f64 + 1.0) / 2.0;
    let b = lambda + 1.0;
    Ok((log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?).exp())
}

/// Applies exp(−¼ d²/dy²) to a polynomial: Σ_j (−1/4)^j p^(2j) / j!.
pub fn hermite_weierstrass(p: &RealPolynomial) -> RealPolynomial {
    let mut out = p.clone();
    let mut deriv = p.clone();
    let mut factor = 1.0;
    let mut j = 0usize;
    loop {
        deriv = deriv.derivative().derivative();
        if deriv.is_zero() {
            break;
        }
        j += 1;
        factor *= -0.25 / j as f64;
        out = out.axpy(factor, &deriv);
    }
    out
}
