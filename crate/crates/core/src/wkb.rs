//! Bohr-Sommerfeld energies and approximately normalized WKB wave functions.

use crate::error::{Error, Result};
use crate::model::{Harmonic, Morse, PoschlTeller};
use crate::quadrature::gauss_legendre;
use crate::wavefunction::{Provenance, WaveFunctionTable};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Fraction of `q+ − q−` excluded next to each turning point.
pub const TURNING_MARGIN: f64 = 0.05;
pub const BISECTION_RTOL: f64 = 1e-12;
const ACTION_NODES: usize = 64;
const ACTION_NODES_CAP: usize = 1024;
const ACTION_RTOL: f64 = 1e-13;
const PHASE_NODES: usize = 96;

/// One-dimensional confining potential with unit mass.
pub trait Potential: Sync {
    fn value(&self, q: f64) -> f64;
    /// Turning points `q− < q+` at energy `e`.
    fn turning_points(&self, e: f64) -> Result<(f64, f64)>;
    /// Energies at or above this are not bound (infinite if all are).
    fn bound_limit(&self) -> f64 {
        f64::INFINITY
    }
    fn maslov(&self) -> u32 {
        2
    }
}

fn check_energy(e: f64, limit: f64) -> Result<()> {
    if !(e > 0.0 && e < limit) {
        return Err(Error::Domain(format!("energy {e} outside the bound range (0, {limit})")));
    }
    Ok(())
}

impl Potential for Harmonic {
    fn value(&self, q: f64) -> f64 {
        Harmonic::potential(q)
    }
    fn turning_points(&self, e: f64) -> Result<(f64, f64)> {
        check_energy(e, f64::INFINITY)?;
        let a = (2.0 * e).sqrt();
        Ok((-a, a))
    }
}

impl Potential for PoschlTeller {
    fn value(&self, q: f64) -> f64 {
        self.potential(q)
    }
    fn turning_points(&self, e: f64) -> Result<(f64, f64)> {
        check_energy(e, f64::INFINITY)?;
        let a = (e / self.v0()).sqrt().atan();
        Ok((-a, a))
    }
}

impl Potential for Morse {
    fn value(&self, q: f64) -> f64 {
        self.potential(q)
    }
    fn turning_points(&self, e: f64) -> Result<(f64, f64)> {
        let depth = 0.5 * self.lambda * self.lambda;
        check_energy(e, depth)?;
        let r = (e / depth).sqrt();
        Ok((-(1.0 + r).ln(), -(1.0 - r).ln()))
    }
    fn bound_limit(&self) -> f64 {
        0.5 * self.lambda * self.lambda
    }
}

fn momentum(pot: &dyn Potential, e: f64, q: f64) -> f64 {
    (2.0 * (e - pot.value(q))).max(0.0).sqrt()
}

/// Integrates `g(q)/p(q)`-type or `p(q)` integrands between the turning points
/// with `q = mid + half·sin φ`, which removes the endpoint square-root behaviour.
fn turning_integral<F: Fn(f64, f64) -> f64>(pot: &dyn Potential, e: f64, f: F) -> Result<f64> {
    let (lo, hi) = pot.turning_points(e)?;
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let eval = |n: usize| -> Result<f64> {
        let rule = gauss_legendre(n)?.mapped(-FRAC_PI_2, FRAC_PI_2);
        Ok(rule.integrate(|phi| {
            let q = mid + half * phi.sin();
            f(q, momentum(pot, e, q)) * half * phi.cos()
        }))
    };
    let mut n = ACTION_NODES;
    let mut prev = eval(n)?;
    while n < ACTION_NODES_CAP {
        n *= 2;
        let cur = eval(n)?;
        if (cur - prev).abs() <= ACTION_RTOL * cur.abs().max(1e-300) {
            return Ok(cur);
        }
        prev = cur;
    }
    Ok(prev)
}

/// `J(E) = (1/π) ∫ p dq` between the turning points.
pub fn action_of_energy(pot: &dyn Potential, e: f64) -> Result<f64> {
    Ok(turning_integral(pot, e, |_, p| p)? / PI)
}

/// Classical period `T = 2 ∫ dq/p`.
pub fn period(pot: &dyn Potential, e: f64) -> Result<f64> {
    let (lo, hi) = pot.turning_points(e)?;
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    // p vanishes like cos φ at the ends; evaluate the ratio cos φ/p directly.
    let rule = gauss_legendre(ACTION_NODES * 4)?.mapped(-FRAC_PI_2, FRAC_PI_2);
    Ok(2.0 * rule.integrate(|phi| {
        let q = mid + half * phi.sin();
        half * phi.cos() / momentum(pot, e, q)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WkbState {
    pub n: usize,
    pub energy: f64,
    pub turning_points: (f64, f64),
    /// `C = √(2ω_cl/π)`
    pub normalization: f64,
    pub omega: f64,
}

impl WkbState {
    /// Interior interval allowed for evaluation.
    pub fn interior(&self) -> (f64, f64) {
        let (lo, hi) = self.turning_points;
        let margin = TURNING_MARGIN * (hi - lo);
        (lo + margin, hi - margin)
    }
}

/// Solves `J(E) = n + μ/4` by bisection.
pub fn bohr_sommerfeld_energy(pot: &dyn Potential, n: usize) -> Result<WkbState> {
    let target = n as f64 + pot.maslov() as f64 / 4.0;
    let limit = pot.bound_limit();
    let mut lo = 0.0;
    let mut hi = if limit.is_finite() { limit } else { 1.0 };
    if limit.is_finite() {
        let top = action_of_energy(pot, limit * (1.0 - 1e-12))?;
        if top <= target {
            return Err(Error::Domain(format!("no bound state with J = {target} (J < {top})")));
        }
    } else {
        let mut grow = 0;
        while action_of_energy(pot, hi)? < target {
            lo = hi;
            hi *= 2.0;
            grow += 1;
            if grow > 200 {
                return Err(Error::Convergence("could not bracket the quantized energy".into()));
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if action_of_energy(pot, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECTION_RTOL * hi {
            break;
        }
    }
    let energy = 0.5 * (lo + hi);
    let omega = 2.0 * PI / period(pot, energy)?;
    Ok(WkbState {
        n,
        energy,
        turning_points: pot.turning_points(energy)?,
        normalization: (2.0 * omega / PI).sqrt(),
        omega,
    })
}

/// `ψ = C p^(−1/2) cos(∫_{q−}^q p dq′ − π/4)` on interior grid points only.
pub fn wkb_value(pot: &dyn Potential, state: &WkbState, q: f64) -> Result<f64> {
    let (a, b) = state.interior();
    if !(q >= a && q <= b) {
        return Err(Error::Domain(format!(
            "q = {q} lies within the turning-point margin (interior is [{a}, {b}])"
        )));
    }
    let e = state.energy;
    let q0 = state.turning_points.0;
    let span = q - q0;
    // q′ = q− + span·t² keeps the integrand smooth at the turning point.
    let rule = gauss_legendre(PHASE_NODES)?.mapped(0.0, 1.0);
    let phase = rule.integrate(|t| momentum(pot, e, q0 + span * t * t) * 2.0 * span * t);
    let p = momentum(pot, e, q);
    Ok(state.normalization / p.sqrt() * (phase - FRAC_PI_4).cos())
}

pub fn wkb_wavefunction(pot: &dyn Potential, state: &WkbState, coords: &[f64]) -> Result<WaveFunctionTable> {
    WaveFunctionTable::from_fn(state.n, Provenance::Wkb, coords, |q| wkb_value(pot, state, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_action_and_energies() {
        for &e in &[0.3, 1.5, 7.0] {
            assert!((action_of_energy(&Harmonic, e).unwrap() - e).abs() < 1e-10);
        }
        for n in 0..6 {
            let s = bohr_sommerfeld_energy(&Harmonic, n).unwrap();
            assert!((s.energy - (n as f64 + 0.5)).abs() < 1e-10);
            assert!((s.omega - 1.0).abs() < 1e-9);
            for q in [s.turning_points.0, s.turning_points.1] {
                assert!((Harmonic::potential(q) - s.energy).abs() < 1e-10);
            }
        }
        assert!(action_of_energy(&Harmonic, -1.0).is_err());
    }

    #[test]
    fn pt_action_closed_form() {
        let p = PoschlTeller::new(10.0).unwrap();
        let v0 = p.v0();
        let mut last = 0.0;
        for &e in &[0.5, 3.0, 11.0, 40.0, 150.0] {
            let j = action_of_energy(&p, e).unwrap();
            let closed = 2f64.sqrt() * ((e + v0).sqrt() - v0.sqrt());
            assert!((j - closed).abs() < 1e-8 * closed, "E {e}");
            assert!(j > last);
            last = j;
        }
        let s = bohr_sommerfeld_energy(&p, 0).unwrap();
        // invert √2(√(E+V₀) − √V₀) = 1/2
        let root = 0.5 / 2f64.sqrt() + v0.sqrt();
        assert!((s.energy - (root * root - v0)).abs() < 1e-10 * s.energy);
        assert!((s.turning_points.0 + s.turning_points.1).abs() < 1e-10);
    }

    #[test]
    fn harmonic_ground_state_mid_well() {
        // p = 1 and zero net phase at the centre, so ψ(0) = √(2/π)
        let s = bohr_sommerfeld_energy(&Harmonic, 0).unwrap();
        let v = wkb_value(&Harmonic, &s, 0.0).unwrap();
        assert!((v - (2.0 / PI).sqrt()).abs() < 1e-10, "{v}");
        // higher states approach the exact amplitude
        let s = bohr_sommerfeld_energy(&Harmonic, 8).unwrap();
        let v = wkb_value(&Harmonic, &s, 0.0).unwrap().abs();
        let exact = Harmonic::exact_value(8, 0.0).abs();
        assert!((v - exact).abs() < 0.02 * exact, "{v} vs {exact}");
    }

    #[test]
    fn margin_is_enforced() {
        let s = bohr_sommerfeld_energy(&Harmonic, 2).unwrap();
        assert!(wkb_value(&Harmonic, &s, s.turning_points.1 - 1e-3).is_err());
        assert!(wkb_value(&Harmonic, &s, 10.0).is_err());
    }

    #[test]
    fn even_states_are_flat_at_the_centre() {
        let p = PoschlTeller::new(10.0).unwrap();
        for n in [0usize, 2, 4] {
            let s = bohr_sommerfeld_energy(&p, n).unwrap();
            let h = 1e-4;
            let d = (wkb_value(&p, &s, h).unwrap().abs() - wkb_value(&p, &s, -h).unwrap().abs()) / (2.0 * h);
            assert!(d.abs() < 1e-6, "n {n}: {d}");
        }
    }

    #[test]
    fn morse_turning_points() {
        let m = Morse::new(12.0).unwrap();
        let s = bohr_sommerfeld_energy(&m, 3).unwrap();
        assert!((s.energy - m.exact_energy(3)).abs() < 1e-9 * s.energy);
        for q in [s.turning_points.0, s.turning_points.1] {
            assert!((m.potential(q) - s.energy).abs() < 1e-10);
        }
    }
}
