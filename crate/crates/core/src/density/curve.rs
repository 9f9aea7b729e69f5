use super::grid::{GridDensity, GridSpec, Provenance};
use crate::euler::PrimeCurve;
use crate::quadrature::ClosedCurve;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Uniform-θ samples of the single-prime curve `θ ↦ −Log(1 − p^{−σ}e^{2πiθ})`,
/// i.e. the pushforward of Haar measure on one circle.
#[derive(Debug, Clone)]
pub struct CurveMeasure {
    pub p: u64,
    pub sigma: f64,
    points: Vec<Complex64>,
}

/// Samples the curve of `p` at `n_samples` equally spaced angles.
pub fn prime_curve_measure(p: u64, sigma: f64, n_samples: usize) -> Result<CurveMeasure> {
    if sigma <= 0.5 {
        return Err(Error::Domain(format!("σ = {sigma} must exceed 1/2")));
    }
    if n_samples < 256 {
        return Err(Error::Domain(format!("{n_samples} samples, need at least 256")));
    }
    let curve = PrimeCurve::new(p, sigma)?;
    let points = (0..n_samples).map(|j| curve.point(j as f64 / n_samples as f64)).collect();
    Ok(CurveMeasure { p, sigma, points })
}

impl CurveMeasure {
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Mean of `w` under the uniform θ-measure.
    pub fn mean(&self) -> Complex64 {
        self.points.iter().sum::<Complex64>() / self.points.len() as f64
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|w| w.norm()).fold(0.0, f64::max)
    }

    /// Bins the samples onto `spec` by cloud-in-cell deposition.
    pub fn rasterize(&self, spec: GridSpec) -> Result<GridDensity> {
        let mut acc = vec![0.0; spec.resolution * spec.resolution];
        let weight = 1.0 / self.points.len() as f64;
        let lost: f64 = self.points.iter().map(|&w| GridDensity::deposit_cic(&spec, &mut acc, w, weight)).sum();
        if lost > 1e-6 {
            return Err(Error::Coverage { reason: format!("curve of p = {} leaves the grid", self.p), lost_mass: lost });
        }
        let scale = 2.0 * PI / (spec.cell_area() * (1.0 - lost));
        acc.iter_mut().for_each(|x| *x *= scale);
        let prov = Provenance::new("curve-raster").with("p", self.p as f64).with("sigma", self.sigma);
        GridDensity::from_values(spec, acc, prov)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_lie_on_the_defining_circle() {
        let m = prime_curve_measure(2, 1.0, 1024).unwrap();
        for w in m.points() {
            assert!(((Complex64::new(1.0, 0.0) - (-w).exp()).norm() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_vanishes() {
        let m = prime_curve_measure(2, 1.0, 1024).unwrap();
        assert!(m.mean().norm() < 1e-12);
    }

    #[test]
    fn max_modulus_at_theta_zero() {
        let m = prime_curve_measure(3, 2.0, 1024).unwrap();
        assert!((m.max_modulus() - 0.117_783_035_656_383_4).abs() < 1e-12);
        assert_eq!(m.points()[0].norm(), m.max_modulus());
    }

    #[test]
    fn conjugate_symmetric() {
        let m = prime_curve_measure(5, 0.75, 512).unwrap();
        let pts = m.points();
        for j in 1..pts.len() {
            assert!((pts[j] - pts[pts.len() - j].conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(prime_curve_measure(2, 0.5, 1024).is_err());
        assert!(prime_curve_measure(2, 1.0, 100).is_err());
    }

    #[test]
    fn raster_has_unit_mass() {
        let m = prime_curve_measure(2, 1.0, 4096).unwrap();
        let d = m.rasterize(GridSpec::centered(1.2, 128).unwrap()).unwrap();
        assert!((d.mass() - 1.0).abs() < 1e-12);
        assert!(m.rasterize(GridSpec::centered(0.3, 64).unwrap()).is_err());
    }
}
