//! Model descriptors and kernel builders.

pub mod harmonic;
pub mod morse;
pub mod poschl_teller;

use crate::error::{Error, Result};
use crate::jetseries::{ComplexSeries, Exponent};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub use harmonic::Harmonic;
pub use morse::Morse;
pub use poschl_teller::PoschlTeller;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "harmonic")]
    Harmonic,
    #[serde(rename = "poschl-teller")]
    PoschlTeller,
    #[serde(rename = "morse")]
    Morse,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Harmonic => "harmonic",
            ModelKind::PoschlTeller => "poschl-teller",
            ModelKind::Morse => "morse",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic" => Ok(ModelKind::Harmonic),
            "poschl-teller" | "pt" => Ok(ModelKind::PoschlTeller),
            "morse" => Ok(ModelKind::Morse),
            other => Err(Error::InvalidInput(format!(
                "unknown model '{other}' (expected harmonic, poschl-teller or morse)"
            ))),
        }
    }
}

/// Residue class `ρ` of the quantum number: `n = 2m + ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Class {
    Even,
    Odd,
}

impl Class {
    pub fn of(n: usize) -> Self {
        if n % 2 == 0 { Class::Even } else { Class::Odd }
    }

    pub fn rho(self) -> usize {
        match self {
            Class::Even => 0,
            Class::Odd => 1,
        }
    }

    pub fn all() -> [Class; 2] {
        [Class::Even, Class::Odd]
    }

    /// `n = 2m + ρ`
    pub fn state(self, m: usize) -> usize {
        2 * m + self.rho()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub kind: ModelKind,
    /// Maslov index μ.
    pub maslov: u32,
    pub classes: [Class; 2],
    pub coupling: Option<f64>,
}

impl ModelDescriptor {
    /// Leading exponent `(μ/4 + ρ)/2` of the class-ρ kernel series.
    pub fn leading_exponent(&self, class: Class) -> Result<Exponent> {
        if self.maslov % 2 != 0 {
            return Err(Error::FractionalExponent(self.maslov as i32));
        }
        Ok(Exponent::from_quarters(self.maslov as i32 / 2 + 2 * class.rho() as i32))
    }
}

/// Source of the class-ρ kernel `Σ_m c_m z^(σ+m)` at a fixed coordinate.
pub trait KernelBuilder: Sync {
    fn descriptor(&self) -> ModelDescriptor;

    /// Series in `z` through relative order `order`.
    fn kernel_series(&self, class: Class, coord: f64, order: usize) -> Result<ComplexSeries>;

    /// The kernel divided by `z^σ`, evaluated pointwise (principal branches
    /// continued from `z = 0`). Valid inside the disc of convergence.
    fn stripped_kernel(&self, class: Class, coord: f64, z: Complex64) -> Result<Complex64>;

    /// Distance from `z = 0` to the nearest kernel singularity at `coord`.
    fn singularity_radius(&self, _coord: f64) -> f64 {
        1.0
    }
}

pub(crate) fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
