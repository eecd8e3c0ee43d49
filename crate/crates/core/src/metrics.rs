//! L² errors, local-energy residuals and trend reports.

use crate::error::{Error, Result};
use crate::model::{Harmonic, ModelKind, PoschlTeller};
use crate::ortho::max_offdiag;
use crate::output::{format_float, format_optional, to_csv};
use crate::pipeline::{self, Family};
use crate::wavefunction::WaveFunctionTable;
use crate::wkb::{self, Potential};
use serde::{Deserialize, Serialize};

pub const INTERIOR_MARGIN: f64 = 0.05;
pub const AMPLITUDE_FLOOR: f64 = 1e-6;

/// `min_s ‖s f̂ − ĝ‖` over s = ±1 with both tables normalized on their grid.
pub fn l2_error(f: &WaveFunctionTable, g: &WaveFunctionTable) -> Result<f64> {
    f.check_same_grid(g)?;
    let (fh, gh) = (f.normalized()?, g.normalized()?);
    let overlap = fh.inner(&gh)?;
    // ‖s f̂ − ĝ‖² = 2 − 2 s⟨f̂,ĝ⟩ is smallest for s = sign⟨f̂,ĝ⟩
    let diff = WaveFunctionTable {
        values: fh
            .values
            .iter()
            .zip(&gh.values)
            .map(|(a, b)| overlap.signum() * a - b)
            .collect(),
        ..fh.clone()
    };
    Ok(diff.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalEnergy {
    pub energy: f64,
    pub rel_std: f64,
    pub points: usize,
}

fn second_derivative(v: &[f64], i: usize, step: usize, h: f64) -> f64 {
    let s = step;
    let hh = h * s as f64;
    (-v[i - 2 * s] + 16.0 * v[i - s] - 30.0 * v[i] + 16.0 * v[i + s] - v[i + 2 * s]) / (12.0 * hh * hh)
}

/// Local energy `ε(q) = −ψ″/(2ψ) + V(q)` from 5-point differences with one
/// Richardson step (spacings h and 2h), over interior points whose amplitude
/// exceeds [`AMPLITUDE_FLOOR`] of the maximum. Returns mean and relative spread.
pub fn rayleigh_residual<V: Fn(f64) -> f64>(
    psi: &WaveFunctionTable,
    potential: V,
    interior_margin: f64,
) -> Result<LocalEnergy> {
    let len = psi.len();
    if len < 9 {
        return Err(Error::Validation("local energy needs at least 9 grid points".into()));
    }
    let h = psi.spacing();
    let lo = psi.coords[0];
    let hi = psi.coords[len - 1];
    let margin = interior_margin * (hi - lo);
    let floor = AMPLITUDE_FLOOR * psi.max_abs();
    let local: Vec<f64> = (4..len - 4)
        .filter(|&i| {
            let q = psi.coords[i];
            q >= lo + margin && q <= hi - margin && psi.values[i].abs() > floor
        })
        .map(|i| {
            let d1 = second_derivative(&psi.values, i, 1, h);
            let d2 = second_derivative(&psi.values, i, 2, h);
            let d = (16.0 * d1 - d2) / 15.0;
            -0.5 * d / psi.values[i] + potential(psi.coords[i])
        })
        .collect();
    if local.len() < 3 {
        return Err(Error::Validation(format!(
            "only {} interior points above the amplitude floor",
            local.len()
        )));
    }
    let n = local.len() as f64;
    let mean = local.iter().sum::<f64>() / n;
    let var = local.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
    Ok(LocalEnergy { energy: mean, rel_std: var.sqrt() / mean.abs(), points: local.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub model: ModelKind,
    pub coupling: Option<f64>,
    pub n: usize,
    pub l2_nonorth: f64,
    pub l2_orth: f64,
    pub l2_wkb: Option<f64>,
    /// Non-orthogonal error restricted to the same interior as `l2_wkb`.
    pub l2_nonorth_interior: Option<f64>,
    pub overlap_offdiag_max: f64,
}

impl ErrorReport {
    /// Which of WKB and the non-orthogonal function is closer to exact inside
    /// the allowed region.
    pub fn interior_winner(&self) -> Option<&'static str> {
        match (self.l2_wkb, self.l2_nonorth_interior) {
            (Some(w), Some(n)) => Some(if w < n { "wkb" } else { "nonorthogonal" }),
            _ => None,
        }
    }
}

fn wkb_comparison(
    pot: &dyn Potential,
    family: &Family,
    n: usize,
) -> Result<(f64, f64)> {
    let state = wkb::bohr_sommerfeld_energy(pot, n)?;
    let (a, b) = state.interior();
    let exact = family.exact[n].restrict(a, b);
    let nonorth = family.nonorthogonal[n].restrict(a, b);
    let approx = wkb::wkb_wavefunction(pot, &state, &exact.coords)?;
    Ok((l2_error(&approx, &exact)?, l2_error(&nonorth, &exact)?))
}

fn reports_for(family: &Family, pot: Option<&dyn Potential>) -> Result<Vec<ErrorReport>> {
    (0..family.exact.len())
        .map(|n| {
            let (l2_wkb, l2_nonorth_interior) = match pot {
                Some(p) => {
                    let (w, i) = wkb_comparison(p, family, n)?;
                    (Some(w), Some(i))
                }
                None => (None, None),
            };
            Ok(ErrorReport {
                model: family.kind,
                coupling: family.coupling,
                n,
                l2_nonorth: l2_error(&family.nonorthogonal[n], &family.exact[n])?,
                l2_orth: l2_error(&family.orthonormalized[n], &family.exact[n])?,
                l2_wkb,
                l2_nonorth_interior,
                overlap_offdiag_max: max_offdiag(&family.overlap, n),
            })
        })
        .collect()
}

/// Runs the whole pipeline for each coupling (ignored for the harmonic
/// model), reporting states `0..=n_max`.
pub fn trend_report(kind: ModelKind, couplings: &[f64], n_max: usize) -> Result<Vec<ErrorReport>> {
    let cells: Vec<Option<f64>> = match kind {
        ModelKind::Harmonic => vec![None],
        _ => couplings.iter().map(|&c| Some(c)).collect(),
    };
    let per_cell = crate::par::try_map(&cells, |&coupling| {
        let grid = pipeline::default_grid(kind, coupling, n_max)?;
        let family = pipeline::build_family(kind, coupling, n_max, &grid.nodes())?;
        match kind {
            ModelKind::Harmonic => reports_for(&family, Some(&Harmonic)),
            ModelKind::PoschlTeller => {
                let pt = PoschlTeller::new(coupling.unwrap_or_default())?;
                reports_for(&family, Some(&pt))
            }
            ModelKind::Morse => reports_for(&family, None),
        }
    })?;
    Ok(per_cell.into_iter().flatten().collect())
}

pub const TREND_HEADER: [&str; 7] = ["model", "coupling", "n", "l2_nonorth", "l2_orth", "l2_wkb", "overlap_max"];

/// Trend table as CSV; missing couplings and WKB errors are empty fields.
pub fn trend_csv(reports: &[ErrorReport]) -> Result<Vec<u8>> {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.model.name().to_string(),
                format_optional(r.coupling),
                r.n.to_string(),
                format_float(r.l2_nonorth),
                format_float(r.l2_orth),
                format_optional(r.l2_wkb),
                format_float(r.overlap_offdiag_max),
            ]
        })
        .collect();
    to_csv(&TREND_HEADER, &rows)
}
