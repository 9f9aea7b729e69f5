use super::observable::Observable;
use crate::density::RectangleRegion;
use crate::euler::{log_zeta_line, neg_log_one_minus, BranchMode, ZetaConfig};
use crate::parallel;
use crate::{Error, Result};
use num_complex::Complex64;

/// Weighted point masses in the `w`-plane.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    samples: Vec<Complex64>,
    weights: Vec<f64>,
    /// Samples dropped before construction (failed branch tracking).
    pub excluded: usize,
}

impl EmpiricalDistribution {
    /// Equal weights when `weights` is `None`; otherwise the given weights,
    /// rescaled to sum to one.
    pub fn new(samples: Vec<Complex64>, weights: Option<Vec<f64>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyDomain("no samples".into()));
        }
        let weights = match weights {
            None => vec![1.0 / samples.len() as f64; samples.len()],
            Some(w) => {
                if w.len() != samples.len() {
                    return Err(Error::Domain(format!("{} weights for {} samples", w.len(), samples.len())));
                }
                if w.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                    return Err(Error::Domain("weights must be finite and nonnegative".into()));
                }
                let total: f64 = w.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::Domain("weights sum to zero".into()));
                }
                w.into_iter().map(|x| x / total).collect()
            }
        };
        Ok(Self { samples, weights, excluded: 0 })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `Σ weight · Φ(sample)`.
    pub fn average<O: Observable + ?Sized>(&self, phi: &O) -> Complex64 {
        parallel::chunked_sum(self.samples.len(), 1 << 14, |k| phi.eval(self.samples[k]) * self.weights[k])
    }
}

/// Weighted fraction of samples in `r`.
pub fn empirical_w(dist: &EmpiricalDistribution, r: &RectangleRegion) -> f64 {
    dist.samples
        .iter()
        .zip(&dist.weights)
        .filter(|(w, _)| r.contains(**w))
        .map(|(_, x)| x)
        .sum()
}

/// Trapezoid weights on `count` equally spaced nodes.
fn trapezoid(count: usize) -> Vec<f64> {
    let mut w = vec![1.0; count];
    if count > 1 {
        w[0] = 0.5;
        w[count - 1] = 0.5;
    }
    w
}

/// Values of `log ζ(σ + it)` on `t ∈ [−T, T]` with spacing `step`, weighted
/// by the trapezoid rule so that `empirical_w` approximates the measure of
/// `{t : log ζ(σ+it) ∈ R}` divided by `2T`. Negative `t` use
/// `log ζ(σ − it) = conj log ζ(σ + it)`. Samples flagged by branch tracking
/// are dropped and counted in `excluded`.
pub fn vertical_samples(sigma: f64, t_max: f64, step: f64, mode: BranchMode, cfg: &ZetaConfig) -> Result<EmpiricalDistribution> {
    if !(t_max > 0.0) {
        return Err(Error::Domain(format!("T = {t_max} must be positive")));
    }
    let line = log_zeta_line(sigma, 0.0, t_max, step, mode, cfg)?;
    let n = line.values.len();
    let base = trapezoid(2 * n - 1);
    let mut samples = Vec::with_capacity(2 * n);
    let mut weights = Vec::with_capacity(2 * n);
    let mut excluded = 0;
    // index k of [0, T] sits at n − 1 + k of the full grid
    for k in 0..n {
        let flagged = line.flagged[k];
        let copies = if k == 0 { 1 } else { 2 };
        if flagged {
            excluded += copies;
            continue;
        }
        samples.push(line.values[k]);
        weights.push(base[n - 1 + k]);
        if k > 0 {
            samples.push(line.values[k].conj());
            weights.push(base[n - 1 - k]);
        }
    }
    let mut dist = EmpiricalDistribution::new(samples, Some(weights))?;
    dist.excluded = excluded;
    Ok(dist)
}

/// `(2T)^{-1} ∫_{−T}^{T} Φ(log L_P(σ + iτ)) dτ` by the trapezoid rule with
/// spacing `step`, where `log L_P(s) = −Σ_{p∈P} Log(1 − p^{−s})`.
pub fn chi_tau_average<O: Observable + ?Sized>(primes: &[u64], sigma: f64, phi: &O, t_max: f64, step: f64) -> Result<Complex64> {
    if sigma <= 0.5 {
        return Err(Error::Domain(format!("σ = {sigma} must exceed 1/2")));
    }
    if !(t_max > 0.0 && step > 0.0) {
        return Err(Error::Domain("T and step must be positive".into()));
    }
    let intervals = (2.0 * t_max / step).round().max(1.0) as usize;
    let h = 2.0 * t_max / intervals as f64;
    let count = intervals + 1;
    let logs: Vec<(f64, f64)> = primes.iter().map(|&p| ((p as f64).powf(-sigma), (p as f64).ln())).collect();
    let weight = |k: usize| if k == 0 || k == count - 1 { 0.5 } else { 1.0 };
    let num = parallel::chunked_sum(count, 1 << 14, |k| {
        let tau = -t_max + k as f64 * h;
        let w: Complex64 = logs.iter().map(|&(r, lp)| neg_log_one_minus(Complex64::from_polar(r, -tau * lp))).sum();
        phi.eval(w) * weight(k)
    });
    let den = parallel::chunked_sum(count, 1 << 14, |k| Complex64::new(weight(k), 0.0));
    Ok(num / den.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averages::TestFunction;
    use crate::fourier::char_function_p;

    #[test]
    fn empirical_basics() {
        let d = EmpiricalDistribution::new(vec![0.0.into(), Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.5)], Some(vec![1.0, 2.0, 1.0])).unwrap();
        let all = RectangleRegion::new(-10.0, 10.0, -10.0, 10.0).unwrap();
        assert!((empirical_w(&d, &all) - 1.0).abs() < 1e-15);
        assert_eq!(empirical_w(&d, &RectangleRegion::new(5.0, 6.0, 5.0, 6.0).unwrap()), 0.0);
        let left = RectangleRegion::new(-10.0, 1.5, -10.0, 10.0).unwrap();
        let right = RectangleRegion::new(1.5, 10.0, -10.0, 10.0).unwrap();
        assert!((empirical_w(&d, &left) + empirical_w(&d, &right) - 1.0).abs() < 1e-15);
        assert!((empirical_w(&d, &left) - 0.75).abs() < 1e-15);
        assert!(EmpiricalDistribution::new(vec![], None).is_err());
        assert!(EmpiricalDistribution::new(vec![0.0.into()], Some(vec![-1.0])).is_err());
    }

    #[test]
    fn vertical_grid_is_symmetric() {
        let d = vertical_samples(2.0, 50.0, 0.5, BranchMode::Default, &ZetaConfig::default()).unwrap();
        assert_eq!(d.len(), 201);
        assert_eq!(d.excluded, 0);
        let mean = d.average(&|w: Complex64| w);
        assert!(mean.im.abs() < 1e-14);
        assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn chi_tau_constant_and_real_part() {
        assert_eq!(chi_tau_average(&[2, 3], 1.0, &TestFunction::Constant, 100.0, 0.1).unwrap(), Complex64::new(1.0, 0.0));
        let re = chi_tau_average(&[2], 1.0, &TestFunction::RealPart, 1e5, 0.05).unwrap();
        assert!(re.norm() < 1e-3, "{re}");
    }

    #[test]
    fn chi_tau_kernel_matches_product() {
        let primes = [2, 3, 5];
        let z = Complex64::new(1.0, 2.0);
        let v = chi_tau_average(&primes, 1.0, &TestFunction::FourierKernel { z }, 2e4, 0.05).unwrap();
        let exact = char_function_p(&primes, 1.0, z).unwrap();
        assert!((v - exact).norm() < 3e-2);
    }
}
