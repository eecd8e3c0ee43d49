use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Uniform grid `lo..=hi` with `points` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidInput(format!("grid bounds {lo}:{hi} must satisfy lo < hi")));
        }
        if points < 3 {
            return Err(Error::InvalidInput(format!("grid needs at least 3 points, got {points}")));
        }
        Ok(Self { lo, hi, points })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.hi } else { self.lo + i as f64 * h })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `lo:hi:points`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidInput(format!("grid '{s}' is not of the form lo:hi:points")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("grid bound '{p}' is not a number")))
        };
        let points = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidInput(format!("grid point count '{}' is not an integer", parts[2])))?;
        Grid::new(num(parts[0])?, num(parts[1])?, points)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Nonorthogonal,
    Orthonormalized,
    Exact,
    Wkb,
}

/// A wave function sampled on a uniform coordinate grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFunctionTable {
    pub n: usize,
    pub provenance: Provenance,
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
}

impl WaveFunctionTable {
    pub fn new(n: usize, provenance: Provenance, coords: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(coords.len(), values.len(), "coordinate/value length mismatch");
        Self { n, provenance, coords, values }
    }

    pub fn from_fn<F>(n: usize, provenance: Provenance, coords: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync + Send,
    {
        let values = crate::par::try_map(coords, |&q| f(q))?;
        Ok(Self::new(n, provenance, coords.to_vec(), values))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    /// Sub-table over `lo <= q <= hi`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        let (coords, values) = self
            .coords
            .iter()
            .zip(&self.values)
            .filter(|(q, _)| **q >= lo && **q <= hi)
            .map(|(q, v)| (*q, *v))
            .unzip();
        Self { n: self.n, provenance: self.provenance, coords, values }
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.coords.len() != other.coords.len() {
            return Err(Error::GridMismatch(format!(
                "{} vs {} points",
                self.coords.len(),
                other.coords.len()
            )));
        }
        let h = self.spacing();
        if self.coords.iter().zip(&other.coords).any(|(a, b)| (a - b).abs() > 1e-9 * h.max(1e-300)) {
            return Err(Error::GridMismatch("node positions differ".into()));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        match self.coords.len() {
            0 | 1 => 0.0,
            n => (self.coords[n - 1] - self.coords[0]) / (n - 1) as f64,
        }
    }

    /// Quadrature weights for the grid measure dq: composite Simpson for an
    /// odd number of nodes, trapezoid otherwise.
    pub fn weights(&self) -> Vec<f64> {
        grid_weights(self.coords.len(), self.spacing())
    }

    /// ∫ f g dq on the shared grid.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| w * a * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).map(f64::sqrt).unwrap_or(0.0)
    }

    pub fn normalized(&self) -> Result<Self> {
        let nrm = self.norm();
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(Error::Validation(format!("table n = {} has zero norm", self.n)));
        }
        Ok(self.scaled(1.0 / nrm))
    }
}

pub fn grid_weights(len: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; len];
    if len < 2 {
        return w;
    }
    if len % 2 == 1 && len >= 3 {
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = if i == 0 || i == len - 1 {
                h / 3.0
            } else if i % 2 == 1 {
                4.0 * h / 3.0
            } else {
                2.0 * h / 3.0
            };
        }
    } else {
        w[0] = h / 2.0;
        w[len - 1] = h / 2.0;
    }
    w
}
