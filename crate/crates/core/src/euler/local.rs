use crate::quadrature::ClosedCurve;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `−Log(1 − x)` on the principal branch, accurate for small `|x|`.
///
/// Requires `|x| < 1`, where `Re(1 − x) > 0` and the branch is unambiguous.
#[inline]
pub fn neg_log_one_minus(x: Complex64) -> Complex64 {
    let (a, b) = (x.re, x.im);
    // |1 - x|² = 1 - 2a + a² + b²
    let re = 0.5 * (-2.0 * a + a * a + b * b).ln_1p();
    let im = (-b).atan2(1.0 - a);
    Complex64::new(-re, -im)
}

/// One summand `−Log(1 − p^{−σ} e^{2πiθ})` of the torus map.
pub fn local_log_term(p: u64, sigma: f64, theta: f64) -> Result<Complex64> {
    if sigma <= 0.0 {
        return Err(Error::Domain(format!("σ = {sigma} must be positive")));
    }
    let r = (p as f64).powf(-sigma);
    Ok(neg_log_one_minus(Complex64::from_polar(r, 2.0 * PI * theta)))
}

/// `−Σ_{p∈P} Log(1 − p^{−s})`, the truncated Euler sum for `log ζ(s)`.
pub fn euler_log_partial(s: Complex64, primes: &[u64]) -> Result<Complex64> {
    if s.re <= 0.0 {
        return Err(Error::Domain(format!("Re s = {} must be positive", s.re)));
    }
    Ok(primes
        .iter()
        .map(|&p| neg_log_one_minus((-s * (p as f64).ln()).exp()))
        .sum())
}

/// The closed curve `θ ↦ −Log(1 − p^{−σ} e^{2πiθ})`.
#[derive(Debug, Clone, Copy)]
pub struct PrimeCurve {
    pub p: u64,
    pub sigma: f64,
    radius: f64,
}

impl PrimeCurve {
    pub fn new(p: u64, sigma: f64) -> Result<Self> {
        if sigma <= 0.0 {
            return Err(Error::Domain(format!("σ = {sigma} must be positive")));
        }
        Ok(Self { p, sigma, radius: (p as f64).powf(-sigma) })
    }

    /// `r_p = p^{−σ}`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `max_θ |w(θ)| = −log(1 − r_p)`, attained at `θ = 0`.
    pub fn max_modulus(&self) -> f64 {
        -(-self.radius).ln_1p()
    }
}

impl ClosedCurve for PrimeCurve {
    fn point(&self, theta: f64) -> Complex64 {
        neg_log_one_minus(Complex64::from_polar(self.radius, 2.0 * PI * theta))
    }

    fn speed_bound(&self) -> f64 {
        // |w'(θ)| = 2π r / |1 − r e^{2πiθ}|
        self.radius / (1.0 - self.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn worked_values() {
        let v = local_log_term(2, 2.0, 0.0).unwrap();
        assert_abs_diff_eq!(v.re, (4.0f64 / 3.0).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.re, 0.2876821, epsilon = 1e-7);
        let v = local_log_term(2, 2.0, 0.5).unwrap();
        assert_abs_diff_eq!(v.re, -(1.25f64).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        let v = local_log_term(2, 2.0, 0.25).unwrap();
        let expect = Complex64::new(-0.5 * (17.0f64 / 16.0).ln(), (0.25f64).atan());
        assert_abs_diff_eq!(v.re, expect.re, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, expect.im, epsilon = 1e-15);
        assert_abs_diff_eq!(v.re, -0.0303123, epsilon = 1e-7);
        assert_abs_diff_eq!(v.im, 0.2449787, epsilon = 1e-7);
    }

    #[test]
    fn nonpositive_sigma_rejected() {
        assert!(matches!(local_log_term(2, 0.0, 0.1), Err(Error::Domain(_))));
        assert!(euler_log_partial(Complex64::new(-1.0, 0.0), &[2]).is_err());
    }

    #[test]
    fn euler_partial_examples() {
        let s = Complex64::new(2.0, 0.0);
        assert_abs_diff_eq!(euler_log_partial(s, &[2]).unwrap().re, (4.0f64 / 3.0).ln(), epsilon = 1e-15);
        assert_eq!(euler_log_partial(s, &[]).unwrap(), Complex64::new(0.0, 0.0));
        let primes = crate::euler::primes_up_to(10_000).unwrap();
        let v = euler_log_partial(s, &primes).unwrap();
        let log_zeta2 = (PI * PI / 6.0).ln();
        // tail Σ_{p>10^4} p^{-2} < 1/10^4
        assert!((v.re - log_zeta2).abs() < 1e-4);
        assert_abs_diff_eq!(v.re, 0.49770, epsilon = 5e-5);
    }

    #[test]
    fn matches_naive_log_for_moderate_arguments() {
        for k in 0..50 {
            let x = Complex64::from_polar(0.9 * (k as f64 / 50.0), k as f64 * 0.37);
            let naive = -(Complex64::new(1.0, 0.0) - x).ln();
            assert!((neg_log_one_minus(x) - naive).norm() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn conjugate_at_reflected_angle(p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 101]),
                                        sigma in 0.05f64..4.0, theta in 0.0f64..1.0) {
            let a = local_log_term(p, sigma, theta).unwrap();
            let b = local_log_term(p, sigma, 1.0 - theta).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-13);
        }
    }
}
