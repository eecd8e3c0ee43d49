//! Per-model assembly of non-orthogonal, orthonormalized and exact families.

use crate::error::{Error, Result};
use crate::model::morse::MorseFunction;
use crate::model::{Class, Harmonic, ModelKind, Morse, PoschlTeller};
use crate::ortho::{gram_schmidt, overlap_matrix, GridQuadrature, InnerProductSpace, MorseGamma, PtMoment};
use crate::special::RealPolynomial;
use crate::synth::synthesize;
use crate::wavefunction::{Grid, Provenance, WaveFunctionTable};
use std::f64::consts::FRAC_PI_2;

/// Grid points used when the caller does not choose a grid.
pub const DEFAULT_POINTS: usize = 2001;

/// States `0..=n_max` of one model at one coupling, sampled on a shared grid.
/// Non-orthogonal and orthonormalized tables are normalized under ∫dq over the
/// full coordinate range where a closed-form measure exists (Pöschl-Teller,
/// Morse), and on the grid otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub kind: ModelKind,
    pub coupling: Option<f64>,
    pub nonorthogonal: Vec<WaveFunctionTable>,
    pub orthonormalized: Vec<WaveFunctionTable>,
    pub exact: Vec<WaveFunctionTable>,
    /// Normalized Gram matrix of the non-orthogonal family.
    pub overlap: Vec<Vec<f64>>,
}

pub fn require_coupling(kind: ModelKind, coupling: Option<f64>) -> Result<f64> {
    coupling.ok_or_else(|| Error::InvalidInput(format!("model {kind} needs --lambda")))
}

/// A grid covering the states `0..=n_max` with negligible tails.
pub fn default_grid(kind: ModelKind, coupling: Option<f64>, n_max: usize) -> Result<Grid> {
    match kind {
        ModelKind::Harmonic => {
            let edge = (2.0 * n_max as f64 + 1.0).sqrt() + 6.0;
            Grid::new(-edge, edge, DEFAULT_POINTS)
        }
        ModelKind::PoschlTeller => Grid::new(-FRAC_PI_2, FRAC_PI_2, DEFAULT_POINTS),
        ModelKind::Morse => {
            let m = Morse::new(require_coupling(kind, coupling)?)?;
            m.check_bound(n_max)?;
            let s_min = m.lambda - n_max as f64 - 0.5;
            let u_max = 1.0 + 12.0 / m.lambda.sqrt() + 1.0;
            Grid::new(-u_max.ln(), 30.0 / s_min + 1.0, DEFAULT_POINTS)
        }
    }
}

fn tables_from<F>(n_max: usize, provenance: Provenance, coords: &[f64], f: F) -> Result<Vec<WaveFunctionTable>>
where
    F: Fn(usize, f64) -> Result<f64> + Sync + Send,
{
    (0..=n_max)
        .map(|n| WaveFunctionTable::from_fn(n, provenance, coords, |q| f(n, q)))
        .collect()
}

/// Pöschl-Teller polynomials `P_{n/2}^(n mod 2)` for n = 0..=n_max.
pub fn pt_polynomials(pt: &PoschlTeller, n_max: usize) -> Result<Vec<RealPolynomial>> {
    (0..=n_max).map(|n| Ok(pt.polynomial(n / 2, Class::of(n))?.poly)).collect()
}

fn pt_family(lambda: f64, n_max: usize, coords: &[f64]) -> Result<Family> {
    let pt = PoschlTeller::new(lambda)?;
    let space = PtMoment::new(lambda)?;
    let polys = pt_polynomials(&pt, n_max)?;
    let normalized: Vec<RealPolynomial> = polys
        .iter()
        .map(|p| Ok(p.scale(1.0 / space.inner(p, p)?.sqrt())))
        .collect::<Result<_>>()?;
    let orth = gram_schmidt(&space, &polys)?.basis;
    let eval = |p: &RealPolynomial, q: f64| -> Result<f64> {
        if q.abs() > FRAC_PI_2 + 1e-12 {
            return Err(Error::Domain(format!("q = {q} lies outside the well")));
        }
        Ok(q.cos().max(0.0).powf(lambda + 0.5) * p.eval(q.sin()))
    };
    Ok(Family {
        kind: ModelKind::PoschlTeller,
        coupling: Some(lambda),
        nonorthogonal: tables_from(n_max, Provenance::Nonorthogonal, coords, |n, q| eval(&normalized[n], q))?,
        orthonormalized: tables_from(n_max, Provenance::Orthonormalized, coords, |n, q| eval(&orth[n], q))?,
        exact: tables_from(n_max, Provenance::Exact, coords, |n, q| pt.exact_value(n, q))?,
        overlap: overlap_matrix(&space, &polys)?,
    })
}

/// Synthesized Morse functions `ψ̃_0..ψ̃_{n_max}`.
pub fn morse_functions(m: &Morse, n_max: usize) -> Result<Vec<MorseFunction>> {
    m.check_bound(n_max)?;
    let idx: Vec<usize> = (0..=n_max).collect();
    crate::par::try_map(&idx, |&n| m.synthesized_function(n))
}

fn morse_family(lambda: f64, n_max: usize, coords: &[f64]) -> Result<Family> {
    let m = Morse::new(lambda)?;
    let space = MorseGamma { lambda };
    let funcs = morse_functions(&m, n_max)?;
    let normalized: Vec<MorseFunction> = funcs
        .iter()
        .map(|f| Ok(space.scale(f, 1.0 / space.inner(f, f)?.sqrt())))
        .collect::<Result<_>>()?;
    let orth = gram_schmidt(&space, &funcs)?.basis;
    Ok(Family {
        kind: ModelKind::Morse,
        coupling: Some(lambda),
        nonorthogonal: tables_from(n_max, Provenance::Nonorthogonal, coords, |n, q| Ok(normalized[n].eval_q(q)))?,
        orthonormalized: tables_from(n_max, Provenance::Orthonormalized, coords, |n, q| Ok(orth[n].eval_q(q)))?,
        exact: tables_from(n_max, Provenance::Exact, coords, |n, q| m.exact_value(n, q))?,
        overlap: overlap_matrix(&space, &funcs)?,
    })
}

fn harmonic_family(n_max: usize, coords: &[f64]) -> Result<Family> {
    let synthesized = (0..=n_max)
        .map(|n| synthesize(&Harmonic, n, coords))
        .collect::<Result<Vec<_>>>()?;
    let nonorthogonal = synthesized.iter().map(|t| t.normalized()).collect::<Result<Vec<_>>>()?;
    let orthonormalized = gram_schmidt(&GridQuadrature, &synthesized)?
        .basis
        .into_iter()
        .map(|t| t.with_provenance(Provenance::Orthonormalized))
        .collect();
    Ok(Family {
        kind: ModelKind::Harmonic,
        coupling: None,
        overlap: overlap_matrix(&GridQuadrature, &synthesized)?,
        nonorthogonal,
        orthonormalized,
        exact: tables_from(n_max, Provenance::Exact, coords, |n, q| Ok(Harmonic::exact_value(n, q)))?,
    })
}

pub fn build_family(kind: ModelKind, coupling: Option<f64>, n_max: usize, coords: &[f64]) -> Result<Family> {
    match kind {
        ModelKind::Harmonic => harmonic_family(n_max, coords),
        ModelKind::PoschlTeller => pt_family(require_coupling(kind, coupling)?, n_max, coords),
        ModelKind::Morse => morse_family(require_coupling(kind, coupling)?, n_max, coords),
    }
}
