//! Command-line front end. Exit codes: 0 success, 1 verification failure,
//! 2 invalid input, 3 numerical failure.

use crate::error::{Error, Result};
use crate::metrics::{trend_csv, trend_report};
use crate::model::{Harmonic, ModelKind, Morse, PoschlTeller};
use crate::output::{emit, format_float, format_optional, to_csv, to_json, Units};
use crate::pipeline::{build_family, default_grid, Family};
use crate::synth::synthesize_contour;
use crate::verify::{self, Fault};
use crate::wavefunction::{Grid, WaveFunctionTable};
use crate::wkb::{self, Potential};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const THREADS_ENV: &str = "ACTIONWAVE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "actionwave", version, about = "Bound-state wave functions from angle-action kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize, orthonormalize and compare wave functions for one model.
    Wavefn(WavefnArgs),
    /// Error trends across couplings, as CSV.
    Report(ReportArgs),
    /// Run the invariant suite and write report files.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct WavefnArgs {
    #[arg(long)]
    model: String,
    /// Coupling Λ (Pöschl-Teller) or Λ̃ (Morse).
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Single state to emit.
    #[arg(long)]
    n: Option<usize>,
    /// Emit all states 0..=nmax.
    #[arg(long)]
    nmax: Option<usize>,
    /// lo:hi:points
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Contour order N (K = 4(N+1) nodes); at least n/2, default 24.
    #[arg(long)]
    order: Option<usize>,
    /// Contour radius; adds a contour-route column when given. Capped per point
    /// at half the distance to the nearest kernel singularity.
    #[arg(long, allow_hyphen_values = true)]
    radius: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Add the WKB approximation inside the classically allowed region.
    #[arg(long)]
    wkb: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    model: String,
    /// Comma-separated couplings.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long)]
    nmax: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FaultArg {
    MorseBranch,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value = "verify-report")]
    out_dir: PathBuf,
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

/// Accumulates validation problems so they can be reported together.
#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn push(&mut self, msg: impl Into<String>) {
        self.0.push(msg.into());
    }

    fn check<T>(&mut self, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(strip_prefix(&e));
                None
            }
        }
    }

    fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInput(self.0.join("; ")))
        }
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::InvalidInput(m) => m.clone(),
        other => other.to_string(),
    }
}

fn parse_couplings(raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidInput(format!("coupling '{}' is not a number", s.trim())))
        })
        .collect()
}

fn check_coupling(kind: ModelKind, c: f64) -> Result<()> {
    match kind {
        ModelKind::Harmonic => Ok(()),
        ModelKind::PoschlTeller => PoschlTeller::new(c).map(|_| ()),
        ModelKind::Morse => Morse::new(c).map(|_| ()),
    }
    .map_err(|e| Error::InvalidInput(format!("--lambda {c}: {}", strip_prefix(&e))))
}

/// A validated `wavefn` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: ModelKind,
    pub coupling: Option<f64>,
    /// States to emit; a single state unless `--nmax` was used.
    pub states: Vec<usize>,
    pub single: bool,
    pub grid: Grid,
    pub order: usize,
    pub radius: Option<f64>,
    pub wkb: bool,
}

fn validate_wavefn(a: &WavefnArgs) -> Result<RunConfig> {
    let mut p = Problems::default();
    let kind = p.check(a.model.parse::<ModelKind>());
    let coupling = match &a.lambda {
        Some(raw) => p.check(parse_couplings(raw)).and_then(|v| {
            if v.len() == 1 {
                Some(v[0])
            } else {
                p.push("wavefn takes a single --lambda");
                None
            }
        }),
        None => None,
    };
    let (states, single) = match (a.n, a.nmax) {
        (Some(n), None) => (vec![n], true),
        (None, Some(m)) => ((0..=m).collect(), false),
        _ => {
            p.push("give exactly one of --n and --nmax");
            (vec![0], true)
        }
    };
    let top = *states.last().unwrap_or(&0);
    if let Some(kind) = kind {
        match (kind, coupling) {
            (ModelKind::Harmonic, Some(_)) => p.push("the harmonic model takes no --lambda"),
            (ModelKind::PoschlTeller | ModelKind::Morse, None) => p.push(format!("model {kind} needs --lambda")),
            (_, Some(c)) => {
                if p.check(check_coupling(kind, c)).is_some() && kind == ModelKind::Morse {
                    p.check(Morse::new(c).and_then(|m| m.check_bound(top)));
                }
            }
            _ => {}
        }
    }
    let grid = match &a.grid {
        Some(g) => p.check(g.parse::<Grid>()),
        None => kind.and_then(|k| default_grid(k, coupling, top).ok()),
    };
    if let (Some(ModelKind::PoschlTeller), Some(g)) = (kind, grid) {
        let edge = std::f64::consts::FRAC_PI_2 + 1e-12;
        if g.lo < -edge || g.hi > edge {
            p.push(format!("Pöschl-Teller grid {g} leaves the well [-π/2, π/2]"));
        }
    }
    let order = a.order.unwrap_or((top / 2).max(verify::CONTOUR_ORDER));
    if order < top / 2 {
        p.push(format!("--order {order} is below n/2 = {}", top / 2));
    }
    if let Some(r) = a.radius {
        if !(r > 0.0 && r < 1.0) {
            p.push(format!("--radius {r} must lie in (0, 1)"));
        }
    }
    p.finish()?;
    Ok(RunConfig {
        kind: kind.expect("validated"),
        coupling,
        states,
        single,
        grid: grid.expect("validated"),
        order,
        radius: a.radius,
        wkb: a.wkb,
    })
}

fn potential(kind: ModelKind, coupling: Option<f64>) -> Result<Box<dyn Potential>> {
    Ok(match kind {
        ModelKind::Harmonic => Box::new(Harmonic),
        ModelKind::PoschlTeller => Box::new(PoschlTeller::new(coupling.unwrap_or_default())?),
        ModelKind::Morse => Box::new(Morse::new(coupling.unwrap_or_default())?),
    })
}

fn exact_energy(kind: ModelKind, coupling: Option<f64>, n: usize) -> Result<f64> {
    Ok(match kind {
        ModelKind::Harmonic => Harmonic::energy(n),
        ModelKind::PoschlTeller => PoschlTeller::new(coupling.unwrap_or_default())?.exact_energy(n),
        ModelKind::Morse => Morse::new(coupling.unwrap_or_default())?.exact_energy(n),
    })
}

/// Per-state output columns.
struct StateColumns {
    n: usize,
    energy_exact: f64,
    nonorthogonal: Vec<f64>,
    orthonormalized: Vec<f64>,
    exact: Vec<f64>,
    wkb: Option<(f64, Vec<Option<f64>>)>,
    contour: Option<Vec<f64>>,
}

/// Contour-route values rescaled onto the non-orthogonal table.
fn contour_column(cfg: &RunConfig, n: usize, coords: &[f64], target: &WaveFunctionTable, r: f64) -> Result<Vec<f64>> {
    let t = match cfg.kind {
        ModelKind::Harmonic => synthesize_contour(&Harmonic, n, coords, r, cfg.order)?,
        ModelKind::PoschlTeller => {
            synthesize_contour(&PoschlTeller::new(cfg.coupling.unwrap_or_default())?, n, coords, r, cfg.order)?
        }
        ModelKind::Morse => synthesize_contour(&Morse::new(cfg.coupling.unwrap_or_default())?, n, coords, r, cfg.order)?,
    };
    let tt = t.inner(&t)?;
    if !(tt > 0.0) {
        return Err(Error::Convergence(format!("contour route gave a zero function for n = {n}")));
    }
    Ok(t.scaled(t.inner(target)? / tt).values)
}

fn state_columns(cfg: &RunConfig, family: &Family, coords: &[f64]) -> Result<Vec<StateColumns>> {
    let pot = potential(cfg.kind, cfg.coupling)?;
    cfg.states
        .iter()
        .map(|&n| {
            let wkb = if cfg.wkb {
                let state = wkb::bohr_sommerfeld_energy(pot.as_ref(), n)?;
                let (a, b) = state.interior();
                let values = coords
                    .iter()
                    .map(|&q| {
                        if q >= a && q <= b {
                            wkb::wkb_value(pot.as_ref(), &state, q).map(Some)
                        } else {
                            Ok(None)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some((state.energy, values))
            } else {
                None
            };
            let contour = match cfg.radius {
                Some(r) => Some(contour_column(cfg, n, coords, &family.nonorthogonal[n], r)?),
                None => None,
            };
            Ok(StateColumns {
                n,
                energy_exact: exact_energy(cfg.kind, cfg.coupling, n)?,
                nonorthogonal: family.nonorthogonal[n].values.clone(),
                orthonormalized: family.orthonormalized[n].values.clone(),
                exact: family.exact[n].values.clone(),
                wkb,
                contour,
            })
        })
        .collect()
}

fn inner_product_note(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Harmonic => "grid quadrature over the requested grid",
        ModelKind::PoschlTeller => "exact moments over the full well",
        ModelKind::Morse => "exact gamma-function moments over the full line",
    }
}

fn wavefn_json(cfg: &RunConfig, coords: &[f64], cols: &[StateColumns]) -> Result<Vec<u8>> {
    let pick = |f: &dyn Fn(&StateColumns) -> Value| -> Value {
        if cfg.single {
            f(&cols[0])
        } else {
            Value::Array(cols.iter().map(f).collect())
        }
    };
    let mut doc = json!({
        "model": cfg.kind.name(),
        "lambda": cfg.coupling,
        "n": if cfg.single { json!(cfg.states[0]) } else { json!(cfg.states) },
        "grid": cfg.grid,
        "q": coords,
        "energy_exact": pick(&|c| json!(c.energy_exact)),
        "psi_nonorthogonal": pick(&|c| json!(c.nonorthogonal)),
        "psi_orthonormalized": pick(&|c| json!(c.orthonormalized)),
        "psi_exact": pick(&|c| json!(c.exact)),
        "metadata": {
            "units": Units::default(),
            "order": cfg.order,
            "radius": cfg.radius,
            "inner_product": inner_product_note(cfg.kind),
        },
    });
    if cfg.wkb {
        doc["energy_wkb"] = pick(&|c| json!(c.wkb.as_ref().map(|w| w.0)));
        doc["psi_wkb"] = pick(&|c| json!(c.wkb.as_ref().map(|w| &w.1)));
    }
    if cfg.radius.is_some() {
        doc["psi_contour"] = pick(&|c| json!(c.contour));
    }
    to_json(&doc)
}

fn wavefn_csv(cfg: &RunConfig, coords: &[f64], cols: &[StateColumns]) -> Result<Vec<u8>> {
    let mut header = vec!["n", "q", "psi_nonorthogonal", "psi_orthonormalized", "psi_exact"];
    if cfg.wkb {
        header.push("psi_wkb");
    }
    if cfg.radius.is_some() {
        header.push("psi_contour");
    }
    let mut rows = Vec::new();
    for c in cols {
        for (i, &q) in coords.iter().enumerate() {
            let mut row = vec![
                c.n.to_string(),
                format_float(q),
                format_float(c.nonorthogonal[i]),
                format_float(c.orthonormalized[i]),
                format_float(c.exact[i]),
            ];
            if let Some((_, w)) = &c.wkb {
                row.push(format_optional(w[i]));
            }
            if let Some(v) = &c.contour {
                row.push(format_float(v[i]));
            }
            rows.push(row);
        }
    }
    to_csv(&header, &rows)
}

fn cmd_wavefn(a: &WavefnArgs) -> Result<i32> {
    let cfg = validate_wavefn(a)?;
    let coords = cfg.grid.nodes();
    let top = *cfg.states.last().expect("at least one state");
    let family = build_family(cfg.kind, cfg.coupling, top, &coords)?;
    let cols = state_columns(&cfg, &family, &coords)?;
    let bytes = match a.format {
        Format::Json => wavefn_json(&cfg, &coords, &cols)?,
        Format::Csv => wavefn_csv(&cfg, &coords, &cols)?,
    };
    emit(a.output.as_deref(), &bytes)?;
    Ok(EXIT_OK)
}

fn cmd_report(a: &ReportArgs) -> Result<i32> {
    let mut p = Problems::default();
    let kind = p.check(a.model.parse::<ModelKind>());
    let couplings = match &a.lambda {
        Some(raw) => p.check(parse_couplings(raw)).unwrap_or_default(),
        None => Vec::new(),
    };
    if let Some(kind) = kind {
        if kind == ModelKind::Harmonic {
            if !couplings.is_empty() {
                p.push("the harmonic model takes no --lambda");
            }
        } else if a.lambda.is_none() {
            p.push(format!("model {kind} needs --lambda"));
        }
        for &c in &couplings {
            if p.check(check_coupling(kind, c)).is_some() && kind == ModelKind::Morse {
                p.check(Morse::new(c).and_then(|m| m.check_bound(a.nmax)));
            }
        }
    }
    p.finish()?;
    let reports = trend_report(kind.expect("validated"), &couplings, a.nmax)?;
    emit(a.output.as_deref(), &trend_csv(&reports)?)?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let fault = match a.inject_fault {
        Some(FaultArg::MorseBranch) => Fault::MorseBranch,
        None => Fault::None,
    };
    let suite = verify::run(fault)?;
    for c in &suite.checks {
        println!("{}", c.line());
    }
    verify::write_reports(&a.out_dir, &suite)?;
    Ok(if suite.passed() { EXIT_OK } else { EXIT_VERIFY })
}

/// Reads the worker cap from the environment; `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(_) => Err(Error::InvalidInput(format!("{THREADS_ENV} is not valid unicode"))),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(Some(t)),
            _ => Err(Error::InvalidInput(format!("{THREADS_ENV} must be an integer >= 1, got '{v}'"))),
        },
    }
}

fn exit_code_for(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERICAL
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match threads_from_env() {
        // a pool already set up earlier in this process is kept
        Ok(Some(t)) => drop(crate::par::init_threads(t)),
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    }
    let result = match &cli.command {
        Command::Wavefn(a) => cmd_wavefn(a),
        Command::Report(a) => cmd_report(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            if e.is_validation() {
                eprintln!("error: {e}");
            } else {
                eprintln!("numerical failure: {e}");
            }
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wavefn(args: &[&str]) -> Result<RunConfig> {
        let mut full = vec!["actionwave", "wavefn"];
        full.extend_from_slice(args);
        match Cli::try_parse_from(full).unwrap().command {
            Command::Wavefn(a) => validate_wavefn(&a),
            _ => unreachable!(),
        }
    }

    #[test]
    fn validation_is_aggregated() {
        let e = wavefn(&["--model", "morse", "--lambda", "12", "--n", "20", "--grid", "1:0:5"]).unwrap_err();
        let msg = e.to_string();
        assert!(e.is_validation());
        assert!(msg.contains("exceeds bound-state count Λ̃−1/2"), "{msg}");
        assert!(msg.contains("lo < hi"), "{msg}");
    }

    #[test]
    fn accepts_spec_style_invocations() {
        let c = wavefn(&["--model", "poschl-teller", "--lambda", "10", "--n", "3", "--grid", "-1.5:1.5:401"]).unwrap();
        assert_eq!(c.grid, Grid::new(-1.5, 1.5, 401).unwrap());
        assert_eq!(c.states, vec![3]);
        let c = wavefn(&["--model", "harmonic", "--nmax", "4"]).unwrap();
        assert_eq!(c.states.len(), 5);
        assert!(!c.single);
    }

    #[test]
    fn rejects_bad_combinations() {
        assert!(wavefn(&["--model", "harmonic", "--n", "1", "--lambda", "3"]).is_err());
        assert!(wavefn(&["--model", "poschl-teller", "--n", "1"]).is_err());
        assert!(wavefn(&["--model", "poschl-teller", "--lambda", "5", "--n", "1", "--grid", "-2:2:11"]).is_err());
        assert!(wavefn(&["--model", "harmonic", "--n", "4", "--order", "1"]).is_err());
        assert!(wavefn(&["--model", "harmonic", "--n", "1", "--nmax", "3"]).is_err());
        assert!(wavefn(&["--model", "harmonic", "--n", "1", "--radius", "1.5"]).is_err());
        assert!(wavefn(&["--model", "square", "--n", "1"]).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["actionwave", "wavefn", "--model", "morse", "--lambda", "12", "--n", "20"]), EXIT_VALIDATION);
        assert_eq!(run(["actionwave", "bogus"]), EXIT_VALIDATION);
        assert_eq!(exit_code_for(&Error::Convergence("x".into())), EXIT_NUMERICAL);
    }
}
