//! Self-check suite run by `actionwave verify`, plus the report files it writes.

use crate::error::Result;
use crate::jetseries::Branch;
use crate::metrics::{self, rayleigh_residual, trend_csv, ErrorReport, INTERIOR_MARGIN};
use crate::model::{Class, Harmonic, KernelBuilder, ModelKind, Morse, PoschlTeller};
use crate::ortho::{gram_schmidt, InnerProductSpace, PtMoment};
use crate::output::{format_float, format_optional, to_csv};
use crate::pipeline::{build_family, default_grid, pt_polynomials};
use crate::special::gegenbauer_poly;
use crate::synth::{contour_coefficient, min_contour_nodes, synthesize};
use crate::wavefunction::Grid;
use crate::wkb;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

pub const COLLINEAR_TOL: f64 = 1e-10;
pub const DUAL_ROUTE_TOL: f64 = 1e-12;
pub const MORSE_COLLINEAR_TOL: f64 = 1e-8;
pub const IDENTITY_TOL: f64 = 1e-10;
pub const CONTOUR_TOL: f64 = 1e-9;
pub const OVERLAP_TOL: f64 = 1e-6;
pub const LOCAL_ENERGY_STD_TOL: f64 = 1e-6;
pub const HARMONIC_ENERGY_TOL: f64 = 1e-8;

pub const PT_COUPLINGS: [f64; 4] = [5.0, 10.0, 20.0, 40.0];
pub const MORSE_COUPLINGS: [f64; 2] = [12.0, 24.0];
pub const MORSE_LAMBDA: f64 = 12.0;
pub const TREND_NMAX: usize = 6;
pub const WKB_NMAX: usize = 4;
/// Contour order giving `K = 4(N+1) = 100` nodes.
pub const CONTOUR_ORDER: usize = 24;
pub const CONTOUR_RADII: [f64; 2] = [0.05, 0.1];

/// Deliberate corruption used to prove the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Flip the square-root branch in the Morse reformulated phase.
    MorseBranch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }

    fn from_result(name: &'static str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(name, passed, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn collinearity_gap(a: &crate::WaveFunctionTable, b: &crate::WaveFunctionTable) -> Result<f64> {
    Ok(1.0 - a.normalized()?.inner(&b.normalized()?)?.abs())
}

fn harmonic_realization() -> Result<(bool, String)> {
    let coords = Grid::new(-6.0, 6.0, 401)?.nodes();
    let mut worst = 0.0f64;
    for n in 0..=12 {
        let t = synthesize(&Harmonic, n, &coords)?;
        worst = worst.max(collinearity_gap(&t, &Harmonic::exact(n, &coords)?)?);
    }
    Ok((worst <= COLLINEAR_TOL, format!("max 1-|overlap| = {worst:.3e}, n <= 12")))
}

fn harmonic_dual_route() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for class in Class::all() {
        for &y in &[-2.3, -0.7, 0.0, 0.4, 1.1, 3.0] {
            let a = Harmonic::kernel_series(class, y, 8)?;
            let b = Harmonic::operator_kernel_series(class, y, 8)?;
            let scale = a.coeffs().iter().fold(0.0f64, |m, c| m.max(c.norm()));
            if a.sigma() != b.sigma() {
                return Ok((false, format!("leading exponents differ at y = {y}")));
            }
            for m in 0..=8 {
                let d = (a.coefficient(m)? - b.coefficient(m)?).norm();
                if scale > 0.0 {
                    worst = worst.max(d / scale);
                }
            }
        }
    }
    Ok((worst <= DUAL_ROUTE_TOL, format!("max relative difference = {worst:.3e}, m <= 8")))
}

fn pt_parity_slots() -> Result<(bool, String)> {
    let pt = PoschlTeller::new(10.0)?;
    for n in 0..=10 {
        let p = pt.polynomial(n / 2, Class::of(n))?;
        let bad = p.poly.coeffs().iter().enumerate().any(|(k, &c)| k % 2 != n % 2 && c != 0.0);
        if bad || p.poly.degree() != n {
            return Ok((false, format!("P for n = {n} has wrong parity or degree")));
        }
    }
    Ok((true, "wrong-parity coefficients are exactly zero, n <= 10".into()))
}

fn gegenbauer_gap(lambda: f64, n_max: usize) -> Result<f64> {
    let pt = PoschlTeller::new(lambda)?;
    let space = PtMoment::new(lambda)?;
    let basis = gram_schmidt(&space, &pt_polynomials(&pt, n_max)?)?.basis;
    let mut worst = 0.0f64;
    for (n, b) in basis.iter().enumerate() {
        let c = gegenbauer_poly(n, lambda + 0.5);
        let ov = space.inner(b, &c)? / (space.inner(b, b)? * space.inner(&c, &c)?).sqrt();
        worst = worst.max(1.0 - ov.abs());
    }
    Ok(worst)
}

fn gram_schmidt_gegenbauer() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for lambda in [5.0, 10.0, 20.0] {
        worst = worst.max(gegenbauer_gap(lambda, 10)?);
    }
    Ok((worst <= COLLINEAR_TOL, format!("max 1-|overlap| = {worst:.3e}, n <= 10")))
}

fn find(reports: &[ErrorReport], coupling: f64, n: usize) -> Option<&ErrorReport> {
    reports.iter().find(|r| r.coupling == Some(coupling) && r.n == n)
}

fn accuracy_trend(pt: &[ErrorReport]) -> (bool, String) {
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for n in 0..=4 {
        match (find(pt, 5.0, n), find(pt, 40.0, n)) {
            (Some(a), Some(b)) => {
                worst_ratio = worst_ratio.max(b.l2_orth / a.l2_orth);
                ok &= b.l2_orth < a.l2_orth / 4.0;
            }
            _ => ok = false,
        }
    }
    for n in 2..=6 {
        ok &= find(pt, 10.0, n).is_some_and(|r| r.l2_orth < r.l2_nonorth);
    }
    (ok, format!("max err(40)/err(5) = {worst_ratio:.3e}; orthonormalized beats non-orthogonal at Λ = 10, n = 2..6: {ok}"))
}

/// `⟨ψ̂_0, ψ̂_2⟩` from the weight moments in closed form.
pub fn pt_overlap_02(lambda: f64) -> f64 {
    -3.0 * ((2.0 * lambda + 5.0) / (2.0 * lambda + 3.0)).sqrt() / (8.0 * lambda * lambda - 4.0 * lambda + 15.0).sqrt()
}

fn overlap_smallness() -> Result<(bool, String)> {
    let ov = |lambda: f64| -> Result<f64> {
        let coords = default_grid(ModelKind::PoschlTeller, Some(lambda), 2)?.nodes();
        Ok(build_family(ModelKind::PoschlTeller, Some(lambda), 2, &coords)?.overlap[0][2])
    };
    let (o10, o40) = (ov(10.0)?, ov(40.0)?);
    let diff = (o10 - pt_overlap_02(10.0)).abs();
    Ok((
        diff <= OVERLAP_TOL && o40.abs() < o10.abs() / 3.0,
        format!("<0,2>(10) = {o10:.6}, closed-form difference {diff:.3e}, <0,2>(40) = {o40:.6}"),
    ))
}

fn morse_exactness() -> Result<(bool, String)> {
    let m = Morse::new(MORSE_LAMBDA)?;
    let coords = default_grid(ModelKind::Morse, Some(MORSE_LAMBDA), 6)?.nodes();
    let fam = build_family(ModelKind::Morse, Some(MORSE_LAMBDA), 6, &coords)?;
    let mut gap = 0.0f64;
    let mut residual = 0.0f64;
    for n in 0..=6 {
        gap = gap.max(collinearity_gap(&fam.orthonormalized[n], &fam.exact[n])?);
        residual = residual.max(m.polynomial(n)?.residual);
    }
    Ok((
        gap <= MORSE_COLLINEAR_TOL && residual <= crate::model::morse::POLY_VALIDATION_TOL,
        format!("max 1-|overlap| = {gap:.3e}, max interpolation residual = {residual:.3e}"),
    ))
}

fn morse_identity(fault: Fault) -> Result<(bool, String)> {
    let m = Morse::new(MORSE_LAMBDA)?;
    let branch = if fault == Fault::MorseBranch { Branch::Alternative } else { Branch::Principal };
    let mut worst = 0.0f64;
    let mut samples = 0;
    for &q in &[-0.15, 0.0, 0.2, 0.6, 1.2] {
        for j in 0..12 {
            let th = 0.2 + (PI - 0.4) * j as f64 / 11.0;
            // points outside the classically allowed set are skipped
            let (Ok(a), Ok(b)) = (m.phase_closed(q, th), m.phase_reformulated(q, th, branch)) else {
                continue;
            };
            worst = worst.max((a - b).norm());
            samples += 1;
        }
    }
    Ok((
        samples > 0 && worst <= IDENTITY_TOL,
        format!("max |closed - reformulated| = {worst:.3e} over {samples} points"),
    ))
}

/// Worst contour-vs-series error for one kernel over `n <= n_max`, relative to
/// the largest coefficient among the samples.
fn contour_gap<K: KernelBuilder + ?Sized>(kernel: &K, coords: &[f64], n_max: usize) -> Result<f64> {
    let nodes = min_contour_nodes(CONTOUR_ORDER);
    let mut worst = 0.0f64;
    for n in 0..=n_max {
        let (class, m) = (Class::of(n), n / 2);
        let exact = coords
            .iter()
            .map(|&q| Ok(*kernel.kernel_series(class, q, m)?.coefficient(m)?))
            .collect::<Result<Vec<_>>>()?;
        let scale = exact.iter().fold(0.0f64, |a, c| a.max(c.norm()));
        for &r in &CONTOUR_RADII {
            for (&q, e) in coords.iter().zip(&exact) {
                let got = contour_coefficient(kernel, class, q, m, r, nodes)?;
                worst = worst.max((got - e).norm() / scale);
            }
        }
    }
    Ok(worst)
}

/// Coordinate samples for the contour comparison, per model.
pub fn contour_samples(kind: ModelKind) -> Vec<f64> {
    match kind {
        ModelKind::Harmonic => vec![-1.9, -0.6, 0.3, 0.7, 1.4],
        ModelKind::PoschlTeller => [-0.7f64, -0.3, 0.1, 0.4, 0.8].iter().map(|x| x.asin()).collect(),
        ModelKind::Morse => [0.85f64, 0.95, 1.1, 1.3, 1.6].iter().map(|u| -u.ln()).collect(),
    }
}

fn contour_agreement() -> Result<(bool, String)> {
    let h = contour_gap(&Harmonic, &contour_samples(ModelKind::Harmonic), 8)?;
    let p = contour_gap(&PoschlTeller::new(10.0)?, &contour_samples(ModelKind::PoschlTeller), 8)?;
    let m = contour_gap(&Morse::new(MORSE_LAMBDA)?, &contour_samples(ModelKind::Morse), 8)?;
    let worst = h.max(p).max(m);
    Ok((
        worst <= CONTOUR_TOL,
        format!("relative gaps harmonic {h:.3e}, Pöschl-Teller {p:.3e}, Morse {m:.3e}"),
    ))
}

fn rayleigh_oracles() -> Result<(bool, String)> {
    let mut worst_std = 0.0f64;
    let mut worst_e = 0.0f64;
    let hg = Grid::new(-8.0, 8.0, 1601)?.nodes();
    for n in 0..=4 {
        let le = rayleigh_residual(&Harmonic::exact(n, &hg)?, Harmonic::potential, INTERIOR_MARGIN)?;
        worst_e = worst_e.max((le.energy - Harmonic::energy(n)).abs());
    }
    let pt = PoschlTeller::new(10.0)?;
    let pg = Grid::new(-FRAC_PI_2, FRAC_PI_2, 3001)?.nodes();
    for n in 0..=4 {
        worst_std = worst_std.max(rayleigh_residual(&pt.exact(n, &pg)?, |q| pt.potential(q), INTERIOR_MARGIN)?.rel_std);
    }
    let m = Morse::new(MORSE_LAMBDA)?;
    let mg = Grid::new(-2.0, 8.0, 10001)?.nodes();
    for n in 0..=6 {
        worst_std = worst_std.max(rayleigh_residual(&m.exact(n, &mg)?, |q| m.potential(q), INTERIOR_MARGIN)?.rel_std);
    }
    Ok((
        worst_std <= LOCAL_ENERGY_STD_TOL && worst_e <= HARMONIC_ENERGY_TOL,
        format!("max local-energy rel_std = {worst_std:.3e}, max harmonic |E - (n+1/2)| = {worst_e:.3e}"),
    ))
}

/// Relative Bohr-Sommerfeld energy errors for Pöschl-Teller, one row per (Λ, n).
pub fn pt_wkb_energy_errors() -> Result<Vec<(f64, usize, f64, f64)>> {
    let mut out = Vec::new();
    for &lambda in &PT_COUPLINGS {
        let pt = PoschlTeller::new(lambda)?;
        for n in 0..=WKB_NMAX {
            let e = wkb::bohr_sommerfeld_energy(&pt, n)?.energy;
            out.push((lambda, n, e, pt.exact_energy(n)));
        }
    }
    Ok(out)
}

fn wkb_convergence(rows: &[(f64, usize, f64, f64)]) -> (bool, String) {
    let mut ok = true;
    for n in 0..=WKB_NMAX {
        let errs: Vec<f64> = rows
            .iter()
            .filter(|r| r.1 == n)
            .map(|r| (r.2 - r.3).abs() / r.3)
            .collect();
        ok &= errs.len() == PT_COUPLINGS.len() && errs.windows(2).all(|w| w[1] < w[0]);
    }
    (ok, format!("relative energy error strictly decreasing over Λ = {PT_COUPLINGS:?}, n <= {WKB_NMAX}: {ok}"))
}

/// Outcome of the suite together with the tables it was judged on.
#[derive(Debug, Clone)]
pub struct Suite {
    pub checks: Vec<Check>,
    pub pt_trend: Vec<ErrorReport>,
    pub pt_wkb_energies: Vec<(f64, usize, f64, f64)>,
}

impl Suite {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs every invariant. Report files are not touched.
pub fn run(fault: Fault) -> Result<Suite> {
    let pt_trend = metrics::trend_report(ModelKind::PoschlTeller, &PT_COUPLINGS, TREND_NMAX)?;
    let pt_wkb_energies = pt_wkb_energy_errors()?;
    let (trend_ok, trend_detail) = accuracy_trend(&pt_trend);
    let (wkb_ok, wkb_detail) = wkb_convergence(&pt_wkb_energies);
    let checks = vec![
        Check::from_result("harmonic realization", harmonic_realization()),
        Check::from_result("harmonic dual-route kernel", harmonic_dual_route()),
        Check::from_result("Pöschl-Teller parity slots", pt_parity_slots()),
        Check::from_result("Gram-Schmidt to Gegenbauer", gram_schmidt_gegenbauer()),
        Check::new("accuracy trend", trend_ok, trend_detail),
        Check::from_result("overlap smallness", overlap_smallness()),
        Check::from_result("Morse exactness", morse_exactness()),
        Check::from_result("Morse reformulation identity", morse_identity(fault)),
        Check::from_result("contour/Rodrigues agreement", contour_agreement()),
        Check::from_result("Rayleigh-quotient oracles", rayleigh_oracles()),
        Check::new("WKB energy convergence", wkb_ok, wkb_detail),
    ];
    Ok(Suite { checks, pt_trend, pt_wkb_energies })
}

const WKB_HEADER: [&str; 9] = [
    "model", "coupling", "n", "energy_wkb", "energy_exact", "energy_rel_error", "l2_wkb",
    "l2_nonorth_interior", "interior_winner",
];

fn wkb_table(reports: &[ErrorReport], energies: &[(f64, usize, f64, f64)]) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for r in reports {
        let Some(&(_, _, e_wkb, e_exact)) = energies.iter().find(|e| Some(e.0) == r.coupling && e.1 == r.n) else {
            continue;
        };
        rows.push(vec![
            r.model.name().to_string(),
            format_optional(r.coupling),
            r.n.to_string(),
            format_float(e_wkb),
            format_float(e_exact),
            format_float((e_wkb - e_exact).abs() / e_exact),
            format_optional(r.l2_wkb),
            format_optional(r.l2_nonorth_interior),
            r.interior_winner().unwrap_or("").to_string(),
        ]);
    }
    to_csv(&WKB_HEADER, &rows)
}

/// Writes the trend tables, the WKB comparison and the invariant summary into
/// `dir`. Returns the paths in a fixed order.
pub fn write_reports(dir: &Path, suite: &Suite) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| crate::Error::InvalidInput(format!("cannot write into {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let files: Vec<(&str, Vec<u8>)> = vec![
        ("trend_harmonic.csv", trend_csv(&metrics::trend_report(ModelKind::Harmonic, &[], TREND_NMAX)?)?),
        ("trend_poschl_teller.csv", trend_csv(&suite.pt_trend)?),
        ("trend_morse.csv", trend_csv(&metrics::trend_report(ModelKind::Morse, &MORSE_COUPLINGS, TREND_NMAX)?)?),
        ("wkb_comparison.csv", wkb_table(&suite.pt_trend, &suite.pt_wkb_energies)?),
        ("invariants.txt", suite.checks.iter().map(|c| c.line() + "\n").collect::<String>().into_bytes()),
    ];
    let mut paths = Vec::new();
    for (name, bytes) in files {
        let p = dir.join(name);
        std::fs::write(&p, bytes).map_err(io)?;
        paths.push(p);
    }
    Ok(paths)
}
