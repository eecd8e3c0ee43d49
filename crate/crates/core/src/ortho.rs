//! Inner products and modified Gram-Schmidt over polynomial families and
//! sampled tables.

use crate::error::{Error, Result};
use crate::model::morse::MorseFunction;
use crate::special::{log_gamma, weight_moment, RealPolynomial};
use crate::wavefunction::WaveFunctionTable;
use serde::{Deserialize, Serialize};

/// A vector becomes rank-deficient when its residual norm falls below this
/// fraction of its original norm.
pub const RANK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerProductKind {
    /// ∫ p q (1 − x²)^Λ dx over (−1, 1)
    PtMoment,
    /// ∫ f g du/u over (0, ∞), termwise through Γ
    MorseGamma,
    /// ∫ f g dq on a shared grid
    Quadrature,
}

pub trait InnerProductSpace {
    type Vector: Clone;

    fn kind(&self) -> InnerProductKind;
    fn inner(&self, a: &Self::Vector, b: &Self::Vector) -> Result<f64>;
    /// `a + s·b`
    fn axpy(&self, a: &Self::Vector, s: f64, b: &Self::Vector) -> Result<Self::Vector>;
    fn scale(&self, a: &Self::Vector, s: f64) -> Self::Vector;
    /// Sign fixing the orientation of an orthonormal vector; `None` keeps the
    /// Gram-Schmidt default (positive projection onto the input vector).
    fn orientation(&self, _v: &Self::Vector) -> Option<f64> {
        None
    }
}

/// Polynomials in x with the weight (1 − x²)^Λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtMoment {
    pub lambda: f64,
}

impl PtMoment {
    pub fn new(lambda: f64) -> Result<Self> {
        weight_moment(0, lambda)?;
        Ok(Self { lambda })
    }
}

impl InnerProductSpace for PtMoment {
    type Vector = RealPolynomial;

    fn kind(&self) -> InnerProductKind {
        InnerProductKind::PtMoment
    }

    fn inner(&self, a: &RealPolynomial, b: &RealPolynomial) -> Result<f64> {
        let top = a.coeffs().len() + b.coeffs().len();
        let moments = (0..top).map(|k| weight_moment(k, self.lambda)).collect::<Result<Vec<_>>>()?;
        let mut sum = 0.0;
        for (i, &ai) in a.coeffs().iter().enumerate() {
            for (j, &bj) in b.coeffs().iter().enumerate() {
                sum += ai * bj * moments[i + j];
            }
        }
        Ok(sum)
    }

    fn axpy(&self, a: &RealPolynomial, s: f64, b: &RealPolynomial) -> Result<RealPolynomial> {
        Ok(a.axpy(s, b))
    }

    fn scale(&self, a: &RealPolynomial, s: f64) -> RealPolynomial {
        a.scale(s)
    }

    fn orientation(&self, v: &RealPolynomial) -> Option<f64> {
        (!v.is_zero()).then(|| v.leading().signum())
    }
}

/// Functions `u^b e^(−Λ̃u) P(u)` under ∫ du/u, i.e. the coordinate measure dq.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseGamma {
    pub lambda: f64,
}

impl MorseGamma {
    /// `∫_0^∞ u^(α−1) e^(−2Λ̃u) du = Γ(α)/(2Λ̃)^α`
    pub fn moment(&self, alpha: f64) -> Result<f64> {
        Ok((log_gamma(alpha)? - alpha * (2.0 * self.lambda).ln()).exp())
    }

    fn check(&self, f: &MorseFunction) -> Result<()> {
        if (f.decay - self.lambda).abs() > 1e-12 * self.lambda {
            return Err(Error::InvalidInput(format!(
                "function decay {} does not match Λ̃ = {}",
                f.decay, self.lambda
            )));
        }
        Ok(())
    }
}

impl InnerProductSpace for MorseGamma {
    type Vector = MorseFunction;

    fn kind(&self) -> InnerProductKind {
        InnerProductKind::MorseGamma
    }

    fn inner(&self, a: &MorseFunction, b: &MorseFunction) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        let alpha0 = a.base + b.base;
        let mut sum = 0.0;
        for (i, &ai) in a.poly.coeffs().iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for (j, &bj) in b.poly.coeffs().iter().enumerate() {
                if bj != 0.0 {
                    sum += ai * bj * self.moment(alpha0 + (i + j) as f64)?;
                }
            }
        }
        Ok(sum)
    }

    fn axpy(&self, a: &MorseFunction, s: f64, b: &MorseFunction) -> Result<MorseFunction> {
        let base = a.base.min(b.base);
        let (ra, rb) = (a.rebased(base)?, b.rebased(base)?);
        Ok(MorseFunction { base, decay: a.decay, poly: ra.poly.axpy(s, &rb.poly) })
    }

    fn scale(&self, a: &MorseFunction, s: f64) -> MorseFunction {
        MorseFunction { poly: a.poly.scale(s), ..a.clone() }
    }
}

/// Tables on a shared uniform grid with the grid measure dq.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GridQuadrature;

impl InnerProductSpace for GridQuadrature {
    type Vector = WaveFunctionTable;

    fn kind(&self) -> InnerProductKind {
        InnerProductKind::Quadrature
    }

    fn inner(&self, a: &WaveFunctionTable, b: &WaveFunctionTable) -> Result<f64> {
        a.inner(b)
    }

    fn axpy(&self, a: &WaveFunctionTable, s: f64, b: &WaveFunctionTable) -> Result<WaveFunctionTable> {
        a.check_same_grid(b)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x + s * y).collect();
        Ok(WaveFunctionTable { values, ..a.clone() })
    }

    fn scale(&self, a: &WaveFunctionTable, s: f64) -> WaveFunctionTable {
        a.scaled(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramSchmidt<V> {
    pub basis: Vec<V>,
    /// Lower-triangular `T` with `basis[k] = Σ_j T[k][j] family[j]`.
    pub transform: Vec<Vec<f64>>,
}

/// Modified Gram-Schmidt, in order. Each output vector is oriented by the
/// space's [`InnerProductSpace::orientation`], falling back to a positive
/// projection onto its input vector.
pub fn gram_schmidt<S: InnerProductSpace>(space: &S, family: &[S::Vector]) -> Result<GramSchmidt<S::Vector>> {
    let mut basis: Vec<S::Vector> = Vec::with_capacity(family.len());
    let mut transform: Vec<Vec<f64>> = Vec::with_capacity(family.len());
    for (k, f) in family.iter().enumerate() {
        let original = space.inner(f, f)?.sqrt();
        if !(original > 0.0) || !original.is_finite() {
            return Err(Error::RankDeficient { index: k, ratio: 0.0 });
        }
        let mut v = f.clone();
        let mut t = vec![0.0; k + 1];
        t[k] = 1.0;
        for (j, e) in basis.iter().enumerate() {
            let p = space.inner(e, &v)?;
            v = space.axpy(&v, -p, e)?;
            for (ti, tj) in t.iter_mut().zip(&transform[j]) {
                *ti -= p * tj;
            }
        }
        let norm = space.inner(&v, &v)?.max(0.0).sqrt();
        let ratio = norm / original;
        if !(ratio > RANK_TOL) {
            return Err(Error::RankDeficient { index: k, ratio });
        }
        let sign = space.orientation(&v).unwrap_or(1.0);
        let s = sign / norm;
        basis.push(space.scale(&v, s));
        transform.push(t.into_iter().map(|x| x * s).collect());
    }
    Ok(GramSchmidt { basis, transform })
}

/// Normalized Gram matrix `⟨f_i, f_j⟩/(‖f_i‖‖f_j‖)`.
pub fn overlap_matrix<S: InnerProductSpace>(space: &S, family: &[S::Vector]) -> Result<Vec<Vec<f64>>> {
    let norms = family
        .iter()
        .map(|f| space.inner(f, f).map(f64::sqrt))
        .collect::<Result<Vec<_>>>()?;
    if let Some(k) = norms.iter().position(|n| !(*n > 0.0)) {
        return Err(Error::RankDeficient { index: k, ratio: 0.0 });
    }
    let n = family.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        out[i][i] = 1.0;
        for j in 0..i {
            let v = space.inner(&family[i], &family[j])? / (norms[i] * norms[j]);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// Largest off-diagonal magnitude in row `i`.
pub fn max_offdiag(matrix: &[Vec<f64>], i: usize) -> f64 {
    matrix[i]
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .fold(0.0, |a, (_, v)| a.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use crate::special::gegenbauer_poly;
    use proptest::prelude::*;

    #[test]
    fn first_two_pt_polynomials() {
        for &l in &[1.0, 4.0, 10.0] {
            let s = 2f64.powf(-l);
            let fam = vec![
                RealPolynomial::constant(s),
                RealPolynomial::new(vec![-0.5 * s, 0.0, l * s]),
            ];
            let gs = gram_schmidt(&PtMoment::new(l).unwrap(), &fam).unwrap();
            let p = &gs.basis[1];
            assert!((p.coeff(0) / p.coeff(2) + 1.0 / (2.0 * l + 3.0)).abs() < 1e-12);
            assert!(p.coeff(2) > 0.0);
        }
    }

    #[test]
    fn monomials_orthogonalize_to_gegenbauer() {
        let l = 6.0;
        let fam: Vec<_> = (0..=8).map(|k| RealPolynomial::monomial(k, 1.0)).collect();
        let gs = gram_schmidt(&PtMoment::new(l).unwrap(), &fam).unwrap();
        for (n, p) in gs.basis.iter().enumerate() {
            let c = gegenbauer_poly(n, l + 0.5);
            let r = c.leading() / p.leading();
            for k in 0..=n {
                assert!((c.coeff(k) - r * p.coeff(k)).abs() < 1e-9 * c.leading().abs(), "n {n} k {k}");
            }
        }
    }

    #[test]
    fn transform_reconstructs_basis() {
        let sp = PtMoment::new(3.0).unwrap();
        let fam: Vec<_> = (0..5).map(|k| RealPolynomial::new(vec![1.0; k + 1])).collect();
        let gs = gram_schmidt(&sp, &fam).unwrap();
        for (k, row) in gs.transform.iter().enumerate() {
            let mut acc = RealPolynomial::zero();
            for (j, &t) in row.iter().enumerate() {
                acc = acc.axpy(t, &fam[j]);
            }
            for i in 0..=k {
                assert!((acc.coeff(i) - gs.basis[k].coeff(i)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let sp = PtMoment::new(2.0).unwrap();
        let fam = vec![RealPolynomial::monomial(1, 1.0), RealPolynomial::monomial(1, 2.0)];
        assert!(matches!(gram_schmidt(&sp, &fam), Err(Error::RankDeficient { index: 1, .. })));
    }

    #[test]
    fn morse_gamma_trivial_moment() {
        let g = MorseGamma { lambda: 12.0 };
        // u^1 · u^1 under du/u: Γ(2)/24²
        let f = MorseFunction { base: 1.0, decay: 12.0, poly: RealPolynomial::constant(1.0) };
        assert!((g.inner(&f, &f).unwrap() - 1.0 / 576.0).abs() < 1e-15);
    }

    #[test]
    fn morse_gamma_matches_halfline() {
        let g = MorseGamma { lambda: 12.0 };
        let a = MorseFunction { base: 3.5, decay: 12.0, poly: RealPolynomial::new(vec![1.0, -2.0, 0.7]) };
        let b = MorseFunction { base: 5.5, decay: 12.0, poly: RealPolynomial::new(vec![0.3, 1.1]) };
        let exact = g.inner(&a, &b).unwrap();
        let quad =
            crate::quadrature::integrate_halfline(|u| a.eval_u(u) * b.eval_u(u) / u, 1.0, 32).unwrap();
        assert!((exact - quad).abs() < 1e-9 * exact.abs());
    }

    proptest! {
        #[test]
        fn pt_moment_matches_quadrature(
            a in proptest::collection::vec(-1.0f64..1.0, 1..13),
            b in proptest::collection::vec(-1.0f64..1.0, 1..13),
            li in 0usize..3,
        ) {
            let l = [5.0, 10.0, 20.0][li];
            let (pa, pb) = (RealPolynomial::new(a), RealPolynomial::new(b));
            let exact = PtMoment::new(l).unwrap().inner(&pa, &pb).unwrap();
            let rule = gauss_legendre(200).unwrap();
            let quad = rule.integrate(|x| pa.eval(x) * pb.eval(x) * (1.0 - x * x).powf(l));
            let scale = rule.integrate(|x| (pa.eval(x) * pb.eval(x)).abs() * (1.0 - x * x).powf(l));
            prop_assert!((exact - quad).abs() <= 1e-10 * scale.max(1e-300));
        }
    }

    #[test]
    fn gram_schmidt_is_idempotent() {
        let sp = PtMoment::new(10.0).unwrap();
        let fam: Vec<RealPolynomial> = (0..8).map(|k| RealPolynomial::monomial(k, 1.0 + k as f64)).collect();
        let once = gram_schmidt(&sp, &fam).unwrap();
        let twice = gram_schmidt(&sp, &once.basis).unwrap();
        for (a, b) in once.basis.iter().zip(&twice.basis) {
            let d = a - b;
            assert!(sp.inner(&d, &d).unwrap().sqrt() < 1e-12);
        }
        for (i, row) in twice.transform.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-12, "T[{i}][{j}] = {v}");
            }
        }
    }
}
