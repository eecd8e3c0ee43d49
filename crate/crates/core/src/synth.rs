//! Wave-function synthesis: Taylor-coefficient (Rodrigues) extraction from
//! class kernels, and the trapezoidal contour sum that approximates the same
//! coefficients.

use crate::error::{Error, Result};
use crate::model::{Class, KernelBuilder};
use crate::quadrature::circle_samples;
use crate::special::factorial;
use crate::wavefunction::{Provenance, WaveFunctionTable};
use num_complex::Complex64;

/// Largest tolerated imaginary part, relative to the largest real value.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-10;

/// `ψ̃_n(q) = m!·c_m(q)` with `n = 2m + ρ`, on every grid point.
pub fn synthesize<K: KernelBuilder + ?Sized>(
    kernel: &K,
    n: usize,
    coords: &[f64],
) -> Result<WaveFunctionTable> {
    let class = Class::of(n);
    let m = n / 2;
    let expected = kernel.descriptor().leading_exponent(class)?;
    let scale = factorial(m);
    let values: Vec<Complex64> = crate::par::try_map(coords, |&q| {
        let series = kernel.kernel_series(class, q, m)?;
        if !series.is_zero() && series.sigma() != expected {
            return Err(Error::LeadingExponent {
                found: series.sigma().quarters(),
                expected: expected.quarters(),
            });
        }
        if series.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(*series.coefficient(m)? * scale)
    })?;
    let peak = values.iter().fold(0.0f64, |a, v| a.max(v.re.abs()));
    let worst = values.iter().fold(0.0f64, |a, v| a.max(v.im.abs()));
    if worst > IMAGINARY_RESIDUE_TOL * peak {
        return Err(Error::ImaginaryResidue { n, residue: if peak > 0.0 { worst / peak } else { worst } });
    }
    Ok(WaveFunctionTable::new(
        n,
        Provenance::Nonorthogonal,
        coords.to_vec(),
        values.iter().map(|v| v.re).collect(),
    ))
}

/// Minimum number of contour nodes for extracting coefficients up to `order`.
pub fn min_contour_nodes(order: usize) -> usize {
    4 * (order + 1)
}

/// `c_m ≈ (1/K) Σ_j S(z_j) z_j^(−m)` over `z_j = r e^(2πij/K)`, where `S` is the
/// kernel with `z^σ` removed. Aliasing error is `O((r/R)^K)` for
/// singularity distance `R`.
pub fn contour_coefficient<K: KernelBuilder + ?Sized>(
    kernel: &K,
    class: Class,
    coord: f64,
    m: usize,
    radius: f64,
    nodes: usize,
) -> Result<Complex64> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("contour radius must be positive, got {radius}")));
    }
    if nodes < min_contour_nodes(m) {
        return Err(Error::InvalidInput(format!(
            "{nodes} contour nodes cannot resolve coefficient {m} (need ≥ {})",
            min_contour_nodes(m)
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for z in circle_samples(radius, nodes) {
        sum += kernel.stripped_kernel(class, coord, z)? * z.powi(-(m as i32));
    }
    Ok(sum / nodes as f64)
}

/// Contour counterpart of [`synthesize`] with `K = 4(N + 1)` nodes,
/// `N = max(order, m)`. The radius is capped at half the local singularity
/// distance.
pub fn synthesize_contour<K: KernelBuilder + ?Sized>(
    kernel: &K,
    n: usize,
    coords: &[f64],
    radius: f64,
    order: usize,
) -> Result<WaveFunctionTable> {
    let class = Class::of(n);
    let m = n / 2;
    let nodes = min_contour_nodes(order.max(m));
    let scale = factorial(m);
    let values = crate::par::try_map(coords, |&q| {
        let r = radius.min(0.5 * kernel.singularity_radius(q));
        Ok::<f64, Error>(contour_coefficient(kernel, class, q, m, r, nodes)?.re * scale)
    })?;
    Ok(WaveFunctionTable::new(n, Provenance::Nonorthogonal, coords.to_vec(), values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Harmonic, Morse, PoschlTeller};

    #[test]
    fn harmonic_synthesis_is_collinear_with_exact() {
        let coords: Vec<f64> = (0..81).map(|i| -6.0 + 0.15 * i as f64).collect();
        for n in 0..=12 {
            let t = synthesize(&Harmonic, n, &coords).unwrap().normalized().unwrap();
            let e = Harmonic::exact(n, &coords).unwrap().normalized().unwrap();
            let ov = t.inner(&e).unwrap().abs();
            assert!((1.0 - ov).abs() < 1e-12, "n {n}: {ov}");
        }
    }

    #[test]
    fn contour_matches_series() {
        let pt = PoschlTeller::new(10.0).unwrap();
        for class in Class::all() {
            for m in 0..4 {
                let series = pt.kernel_series(class, 0.4, m).unwrap();
                let exact = series.coefficient(m).unwrap();
                let got = contour_coefficient(&pt, class, 0.4, m, 0.1, min_contour_nodes(8)).unwrap();
                assert!((got - exact).norm() < 1e-9 * exact.norm(), "{class:?} {m}");
            }
        }
    }

    #[test]
    fn contour_rejects_bad_inputs() {
        assert!(contour_coefficient(&Harmonic, Class::Even, 0.0, 3, 0.1, 8).is_err());
        assert!(contour_coefficient(&Harmonic, Class::Even, 0.0, 1, -0.1, 16).is_err());
    }

    #[test]
    fn morse_synthesis_class_sigma_and_reality() {
        let m = Morse::new(12.0).unwrap();
        let coords: Vec<f64> = (0..41).map(|i| -0.4 + 0.05 * i as f64).collect();
        for n in 0..=6 {
            let t = synthesize(&m, n, &coords).unwrap();
            assert_eq!(t.len(), 41);
        }
    }

    /// Harmonic kernel with a wrong leading exponent.
    struct Shifted;

    impl KernelBuilder for Shifted {
        fn descriptor(&self) -> crate::model::ModelDescriptor {
            Harmonic.descriptor()
        }
        fn kernel_series(&self, class: Class, coord: f64, order: usize) -> Result<crate::jetseries::ComplexSeries> {
            Ok(Harmonic.kernel_series(class, coord, order)?.shift(crate::jetseries::Exponent::from_quarters(2)))
        }
        fn stripped_kernel(&self, class: Class, coord: f64, z: Complex64) -> Result<Complex64> {
            Harmonic.stripped_kernel(class, coord, z)
        }
    }

    #[test]
    fn wrong_leading_exponent_is_rejected() {
        let err = synthesize(&Shifted, 2, &[0.3, 0.5]).unwrap_err();
        assert!(matches!(err, Error::LeadingExponent { found: 3, expected: 1 }), "{err:?}");
    }
}
