//! Gauss-Legendre rules, a rationally mapped half-line integrator and circle nodes
//! for trapezoidal contour sums.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

impl QuadratureRule {
    /// Affine map of the rule onto `(lo, hi)`.
    pub fn mapped(&self, lo: f64, hi: f64) -> QuadratureRule {
        let (a, b) = self.interval;
        let s = (hi - lo) / (b - a);
        QuadratureRule {
            nodes: self.nodes.iter().map(|x| lo + (x - a) * s).collect(),
            weights: self.weights.iter().map(|w| w * s).collect(),
            interval: (lo, hi),
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

const NEWTON_MAX_ITER: usize = 100;

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidInput("Gauss-Legendre rule needs n >= 1".into()));
    }
    if n == 1 {
        return Ok(QuadratureRule { nodes: vec![0.0], weights: vec![2.0], interval: (-1.0, 1.0) });
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 4.0 * f64::EPSILON {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence(format!("Legendre root {i} of n = {n}")));
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights, interval: (-1.0, 1.0) })
}

fn rule_cache() -> &'static Mutex<HashMap<usize, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// n-point Gauss-Legendre rule on (−1, 1); nodes ascending.
pub fn gauss_legendre(n: usize) -> Result<Arc<QuadratureRule>> {
    if let Some(rule) = rule_cache().lock().expect("rule cache poisoned").get(&n) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(compute_gauss_legendre(n)?);
    rule_cache().lock().expect("rule cache poisoned").insert(n, rule.clone());
    Ok(rule)
}

pub const HALFLINE_START: usize = 32;
pub const HALFLINE_CAP: usize = 4096;
pub const HALFLINE_RTOL: f64 = 1e-10;

/// ∫_0^∞ f(u) du via u = scale·v/(1 − v) on (0, 1), doubling the
/// Gauss-Legendre order until successive estimates agree relative to ∫|f|.
///
/// `scale` should be near where the bulk of `f` sits.
pub fn integrate_halfline<F: Fn(f64) -> f64>(f: F, scale: f64, n: usize) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::InvalidInput(format!("half-line scale must be positive, got {scale}")));
    }
    // Returns (∫f, ∫|f|); the second sets the scale for the stopping test so
    // that integrals cancelling to ~0 still terminate.
    let eval = |m: usize| -> Result<(f64, f64)> {
        let rule = gauss_legendre(m)?.mapped(0.0, 1.0);
        let mut sum = 0.0;
        let mut abs = 0.0;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let u = scale * t / (1.0 - t);
            let v = w * f(u) * scale / ((1.0 - t) * (1.0 - t));
            sum += v;
            abs += v.abs();
        }
        Ok((sum, abs))
    };
    let mut m = n.max(1);
    let (mut prev, _) = eval(m)?;
    while m < HALFLINE_CAP {
        m = (2 * m).min(HALFLINE_CAP);
        let (cur, abs) = eval(m)?;
        if (cur - prev).abs() <= HALFLINE_RTOL * abs {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Convergence(format!("half-line integral did not settle by n = {HALFLINE_CAP}")))
}

/// K counter-clockwise nodes r·e^(2πij/K).
pub fn circle_samples(r: f64, k: usize) -> Vec<Complex64> {
    (0..k)
        .map(|j| Complex64::from_polar(r, 2.0 * PI * j as f64 / k as f64))
        .collect()
}
