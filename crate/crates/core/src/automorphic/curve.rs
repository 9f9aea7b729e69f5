use crate::euler::{neg_log_one_minus, PrimitiveFormData};
use crate::fourier::log_spaced;
use crate::parallel;
use crate::quadrature::{oscillatory_mean, ClosedCurve, TrapezoidConfig};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// `θ ↦ −Log(1 − α r e^{2πiθ}) − Log(1 − β r e^{2πiθ})` with `r = p^{−σ}`.
#[derive(Debug, Clone, Copy)]
pub struct AutomorphicCurve {
    pub p: u64,
    pub sigma: f64,
    pub lambda: f64,
    alpha: Complex64,
    beta: Complex64,
    radius: f64,
}

/// The curve of `form` at the good prime `p`.
pub fn automorphic_curve(form: &PrimitiveFormData, p: u64, sigma: f64) -> Result<AutomorphicCurve> {
    if sigma <= 0.5 {
        return Err(Error::Domain(format!("σ = {sigma} must exceed 1/2")));
    }
    if form.divides_level(p) {
        return Err(Error::Precondition(format!("p = {p} divides the level {}", form.level)));
    }
    let lambda = form.lambda(p)?;
    let (alpha, beta) = form.satake(p)?;
    Ok(AutomorphicCurve { p, sigma, lambda, alpha, beta, radius: (p as f64).powf(-sigma) })
}

pub fn automorphic_curve_eval(form: &PrimitiveFormData, p: u64, sigma: f64, theta: f64) -> Result<Complex64> {
    Ok(automorphic_curve(form, p, sigma)?.point(theta))
}

impl AutomorphicCurve {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn satake(&self) -> (Complex64, Complex64) {
        (self.alpha, self.beta)
    }

    fn unit(&self, theta: f64) -> Complex64 {
        Complex64::from_polar(self.radius, 2.0 * PI * theta)
    }

    /// `−Log(1 − λu + u²)` with `u = r e^{2πiθ}`; agrees with
    /// [`point`](ClosedCurve::point) because `αβ = 1`.
    pub fn quadratic_form(&self, theta: f64) -> Complex64 {
        let u = self.unit(theta);
        -(Complex64::new(1.0, 0.0) - self.lambda * u + u * u).ln()
    }

    /// `dz/dθ = 2πi Σ x/(1 − x)` over `x ∈ {αu, βu}`.
    pub fn derivative(&self, theta: f64) -> Complex64 {
        let u = self.unit(theta);
        let i2pi = Complex64::new(0.0, 2.0 * PI);
        [self.alpha, self.beta].iter().map(|&a| i2pi * a * u / (1.0 - a * u)).sum()
    }

    /// `d²z/dθ² = (2πi)² Σ x/(1 − x)²`.
    pub fn second_derivative(&self, theta: f64) -> Complex64 {
        let u = self.unit(theta);
        let i2pi = Complex64::new(0.0, 2.0 * PI);
        [self.alpha, self.beta].iter().map(|&a| i2pi * i2pi * a * u / ((1.0 - a * u) * (1.0 - a * u))).sum()
    }

    /// Upper bounds for `max|z''|` and `max|z'''|`.
    pub fn derivative_bounds(&self) -> (f64, f64) {
        let r = self.radius;
        let second = 4.0 * PI * PI * 2.0 * r / ((1.0 - r) * (1.0 - r));
        let third = 8.0 * PI.powi(3) * 2.0 * r * (1.0 + r) / (1.0 - r).powi(3);
        (second, third)
    }

    /// `max_θ |z(θ)| ≤ −2 log(1 − r)`.
    pub fn modulus_bound(&self) -> f64 {
        -2.0 * (-self.radius).ln_1p()
    }
}

impl ClosedCurve for AutomorphicCurve {
    fn point(&self, theta: f64) -> Complex64 {
        let u = self.unit(theta);
        neg_log_one_minus(self.alpha * u) + neg_log_one_minus(self.beta * u)
    }

    fn speed_bound(&self) -> f64 {
        2.0 * self.radius / (1.0 - self.radius)
    }
}

/// `∫₀¹ exp(i⟨w, z_{f,p}(θ)⟩) dθ`.
pub fn jw_type_integral(form: &PrimitiveFormData, p: u64, sigma: f64, w: Complex64) -> Result<Complex64> {
    oscillatory_mean(&automorphic_curve(form, p, sigma)?, w, &TrapezoidConfig::default())
}

/// `p^{σ/2}|w|^{−1/2} + p^σ|w|^{−1}`.
pub fn jw_bound(p: u64, sigma: f64, w_abs: f64) -> f64 {
    let p = p as f64;
    p.powf(sigma / 2.0) / w_abs.sqrt() + p.powf(sigma) / w_abs
}

#[derive(Debug, Clone, Serialize)]
pub struct JwOctave {
    pub radius_min: f64,
    pub radius_max: f64,
    /// `max |∫| / jw_bound` over the samples in this octave.
    pub constant: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JwConstantProfile {
    pub p: u64,
    pub sigma: f64,
    pub lambda: f64,
    pub octaves: Vec<JwOctave>,
    /// Largest ratio between the constants of adjacent octaves (either way).
    pub max_adjacent_ratio: f64,
}

impl JwConstantProfile {
    pub fn stable_within(&self, factor: f64) -> bool {
        self.max_adjacent_ratio <= factor
    }

    pub fn overall_constant(&self) -> f64 {
        self.octaves.iter().map(|o| o.constant).fold(0.0, f64::max)
    }
}

/// Measured constant in `|∫| ≤ C·jw_bound` per doubling of `|w|` from
/// `r_min` up to `r_max`, with `per_octave` radii and `directions` angles.
pub fn jw_constant_profile(
    form: &PrimitiveFormData,
    p: u64,
    sigma: f64,
    r_min: f64,
    r_max: f64,
    per_octave: usize,
    directions: usize,
) -> Result<JwConstantProfile> {
    if !(r_min > 0.0 && r_max > r_min) || per_octave == 0 || directions == 0 {
        return Err(Error::Domain("need 0 < r_min < r_max and nonzero sample counts".into()));
    }
    let curve = automorphic_curve(form, p, sigma)?;
    let cfg = TrapezoidConfig::default();
    let mut bounds = Vec::new();
    let mut lo = r_min;
    while lo < r_max * (1.0 - 1e-12) {
        let hi = (2.0 * lo).min(r_max);
        bounds.push((lo, hi));
        lo = hi;
    }
    let dirs: Vec<Complex64> =
        (0..directions).map(|k| Complex64::from_polar(1.0, PI * (2 * k + 1) as f64 / directions as f64)).collect();
    let octaves = bounds
        .iter()
        .map(|&(lo, hi)| {
            let radii = log_spaced(lo, hi, per_octave + 1);
            let radii = &radii[..per_octave.max(1)];
            let vals = parallel::try_map_indexed(radii.len() * directions, |k| {
                let r = radii[k / directions];
                let v = oscillatory_mean(&curve, dirs[k % directions] * r, &cfg)?;
                Ok::<_, Error>(v.norm() / jw_bound(p, sigma, r))
            })?;
            Ok(JwOctave { radius_min: lo, radius_max: hi, constant: vals.into_iter().fold(0.0, f64::max) })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_adjacent_ratio = octaves
        .windows(2)
        .map(|w| (w[1].constant / w[0].constant).max(w[0].constant / w[1].constant))
        .fold(1.0, f64::max);
    Ok(JwConstantProfile { p, sigma, lambda: curve.lambda, octaves, max_adjacent_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn delta() -> PrimitiveFormData {
        PrimitiveFormData::ramanujan_delta(200).unwrap()
    }

    #[test]
    fn lambda_two_gives_doubled_zeta_term() {
        let f = PrimitiveFormData::from_eigenvalues(12, 1, BTreeMap::from([(3, 2.0)])).unwrap();
        let v = automorphic_curve_eval(&f, 3, 1.0, 0.0).unwrap();
        assert!((v.re + 2.0 * (1.0 - 1.0 / 3.0f64).ln()).abs() < 1e-14 && v.im.abs() < 1e-14);
    }

    #[test]
    fn delta_at_two() {
        let v = automorphic_curve_eval(&delta(), 2, 1.0, 0.0).unwrap();
        let lambda = -24.0 / 2f64.powf(5.5);
        let expect = -(1.0 - lambda / 2.0 + 0.25f64).ln();
        assert!((v.re - expect).abs() < 1e-14 && v.im.abs() < 1e-14);
        assert!((v.re + 0.415_524_4).abs() < 1e-7);
    }

    #[test]
    fn two_log_and_quadratic_forms_agree() {
        let f = delta();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &p in &[2u64, 5, 47, 199] {
            let c = automorphic_curve(&f, p, 0.75).unwrap();
            for _ in 0..64 {
                let t: f64 = rng.gen();
                assert!((c.point(t) - c.quadratic_form(t)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let c = automorphic_curve(&delta(), 3, 1.0).unwrap();
        let h = 1e-5;
        for t in [0.0, 0.13, 0.5, 0.77] {
            let fd1 = (c.point(t + h) - c.point(t - h)) / (2.0 * h);
            let fd2 = (c.point(t + h) - 2.0 * c.point(t) + c.point(t - h)) / (h * h);
            assert!((fd1 - c.derivative(t)).norm() < 1e-7);
            assert!((fd2 - c.second_derivative(t)).norm() < 1e-3);
        }
    }

    #[test]
    fn jw_integral_symmetries() {
        let f = delta();
        assert_eq!(jw_type_integral(&f, 47, 1.0, 0.0.into()).unwrap(), Complex64::new(1.0, 0.0));
        let w = Complex64::new(30.0, -12.0);
        let a = jw_type_integral(&f, 47, 1.0, w).unwrap();
        assert!((jw_type_integral(&f, 47, 1.0, w.conj()).unwrap() - a).norm() < 1e-13);
        assert!((jw_type_integral(&f, 47, 1.0, -w).unwrap() - a.conj()).norm() < 1e-13);
        assert!(a.norm() <= 1.0);
    }

    #[test]
    fn bad_prime_is_rejected() {
        let f = PrimitiveFormData::from_eigenvalues(2, 11, BTreeMap::from([(11, 1.0), (2, -2.0)])).unwrap();
        assert!(matches!(automorphic_curve(&f, 11, 1.0), Err(Error::Precondition(_))));
        assert!(matches!(automorphic_curve(&f, 3, 1.0), Err(Error::DataCoverage(_))));
    }

    #[test]
    fn constant_profile_for_a_pf_prime() {
        let prof = jw_constant_profile(&delta(), 47, 1.0, 10.0, 1e3, 5, 16).unwrap();
        assert_eq!(prof.octaves.len(), 7);
        assert!(prof.stable_within(2.0), "{:?}", prof.octaves);
    }
}
