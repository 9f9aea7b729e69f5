use super::curve::{automorphic_curve, AutomorphicCurve};
use crate::averages::{empirical_w, EmpiricalDistribution};
use crate::density::{edge_decay, invert_curve_product, pushforward_histogram, ConstructionOptions, GridDensity, GridSpec, Provenance, RectangleRegion};
use crate::euler::{neg_log_one_minus, primes_up_to, PrimitiveFormData};
use crate::fourier::{dual_spec, ProductCharFunction};
use crate::parallel;
use crate::quadrature::ClosedCurve;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;

/// Largest tolerated `|Π factors|` at the edge of the z-grid.
const DECAY_THRESHOLD: f64 = 1e-8;

fn curves(form: &PrimitiveFormData, sigma: f64, primes: &[u64]) -> Result<Vec<AutomorphicCurve>> {
    if primes.is_empty() {
        return Err(Error::EmptyDomain("no primes".into()));
    }
    primes.iter().map(|&p| automorphic_curve(form, p, sigma)).collect()
}

/// `Σ_{p∈P} −2 log(1 − p^{−σ})`, a bound for `|log L_P(f, σ+it)|`.
pub fn automorphic_support_radius(form: &PrimitiveFormData, sigma: f64, primes: &[u64]) -> Result<f64> {
    Ok(curves(form, sigma, primes)?.iter().map(|c| c.modulus_bound()).sum())
}

/// Density of `Σ_{p∈P} z_{f,p}(θ_p)` under Haar measure, by Fourier
/// inversion of the product of the one-prime characteristic factors.
///
/// The product must already be below `1e−8` on the circle of radius
/// `15/16·Z` in the dual grid.
pub fn automorphic_density(
    form: &PrimitiveFormData,
    sigma: f64,
    primes: &[u64],
    spec: GridSpec,
    opts: &ConstructionOptions,
) -> Result<GridDensity> {
    let cs = curves(form, sigma, primes)?;
    let radius: f64 = cs.iter().map(|c| c.modulus_bound()).sum();
    if !spec.contains_disk(Complex64::new(0.0, 0.0), radius) {
        return Err(Error::Coverage {
            reason: format!("grid does not contain the support disk of radius {radius:.6}"),
            lost_mass: f64::NAN,
        });
    }
    let edge = 15.0 / 16.0 * dual_spec(&spec).half_width;
    let decay = edge_decay(&ProductCharFunction::new(cs.clone(), edge), edge)?;
    if decay >= DECAY_THRESHOLD {
        return Err(Error::Precondition(format!(
            "characteristic function is {decay:.3e} at |z| = {edge:.2}, above {DECAY_THRESHOLD:.0e}; \
             enlarge P or refine the grid"
        )));
    }
    let mut d = invert_curve_product(cs, spec, opts)?;
    d.provenance = d
        .provenance
        .with("sigma", sigma)
        .with("primes", primes.len() as f64)
        .with("largest_prime", *primes.iter().max().unwrap() as f64);
    Ok(d)
}

/// Seeded Monte Carlo histogram of `Σ_{p∈P} z_{f,p}(θ_p)`.
pub fn automorphic_torus_histogram(
    form: &PrimitiveFormData,
    sigma: f64,
    primes: &[u64],
    n_samples: usize,
    seed: u64,
    spec: GridSpec,
) -> Result<GridDensity> {
    let cs = curves(form, sigma, primes)?;
    let radius = cs.iter().map(|c| c.modulus_bound()).sum();
    let sample = |rng: &mut rand_chacha::ChaCha8Rng| cs.iter().map(|c| c.point(rng.gen::<f64>())).sum();
    let mut d = pushforward_histogram(sample, n_samples, seed, spec, radius)?;
    d.provenance = Provenance { method: "automorphic-torus-monte-carlo".into(), seed: Some(seed), ..d.provenance }
        .with("sigma", sigma)
        .with("primes", primes.len() as f64)
        .with("samples", n_samples as f64);
    Ok(d)
}

/// Upper bound for `Σ_{p>X} 4p^{−σ}` (σ > 1) from `π(x) < 1.26·x/log x`.
pub fn euler_tail_bound(sigma: f64, x: f64) -> f64 {
    4.0 * 1.26 * sigma * x.powf(1.0 - sigma) / ((sigma - 1.0) * x.ln())
}

/// Values of the truncated `log L_f(σ + it)` on `t ∈ [−T, T]`.
#[derive(Debug, Clone)]
pub struct AutomorphicSamples {
    pub sigma: f64,
    /// Euler product cutoff.
    pub cutoff: u64,
    pub tail_bound: f64,
    pub distribution: EmpiricalDistribution,
}

impl AutomorphicSamples {
    /// Samples with spacing `step`, trapezoid-weighted, the Euler sum cut at
    /// the smallest `X` whose tail bound is within `tail_tolerance`.
    pub fn new(form: &PrimitiveFormData, sigma: f64, t_max: f64, step: f64, tail_tolerance: f64) -> Result<Self> {
        if sigma <= 1.0 {
            return Err(Error::Domain(format!("σ = {sigma} must exceed 1 for the absolutely convergent Euler sum")));
        }
        if !(t_max > 0.0 && step > 0.0) {
            return Err(Error::Domain("T and step must be positive".into()));
        }
        let table_max = form.primes().filter(|&p| !form.divides_level(p)).last().unwrap_or(0);
        let mut x = 16.0f64;
        while euler_tail_bound(sigma, x) > tail_tolerance {
            x *= 1.05;
            if x > table_max as f64 {
                return Err(Error::Precision(format!(
                    "Euler tail bound {:.3e} at X = {table_max} exceeds {tail_tolerance:.1e}",
                    euler_tail_bound(sigma, table_max as f64)
                )));
            }
        }
        let cutoff = x.ceil() as u64;
        let terms: Vec<(Complex64, Complex64, f64)> = primes_up_to(cutoff)?
            .into_vec()
            .into_iter()
            .filter(|&p| !form.divides_level(p))
            .map(|p| {
                let (a, b) = form.satake(p)?;
                let r = (p as f64).powf(-sigma);
                Ok((a * r, b * r, (p as f64).ln()))
            })
            .collect::<Result<_>>()?;
        let intervals = (t_max / step).round().max(1.0) as usize;
        let h = t_max / intervals as f64;
        let half = parallel::map_indexed(intervals + 1, |k| {
            let t = k as f64 * h;
            terms
                .iter()
                .map(|&(a, b, lp)| {
                    let u = Complex64::from_polar(1.0, -t * lp);
                    neg_log_one_minus(a * u) + neg_log_one_minus(b * u)
                })
                .sum::<Complex64>()
        });
        // mirror to t < 0 via conjugation; trapezoid weights over [−T, T]
        let mut samples = Vec::with_capacity(2 * intervals + 1);
        let mut weights = Vec::with_capacity(2 * intervals + 1);
        for (k, &v) in half.iter().enumerate() {
            let w = if k == intervals { 0.5 } else { 1.0 };
            samples.push(v);
            weights.push(w);
            if k > 0 {
                samples.push(v.conj());
                weights.push(w);
            }
        }
        Ok(Self {
            sigma,
            cutoff,
            tail_bound: euler_tail_bound(sigma, x),
            distribution: EmpiricalDistribution::new(samples, Some(weights))?,
        })
    }

    pub fn fraction(&self, r: &RectangleRegion) -> f64 {
        empirical_w(&self.distribution, r)
    }
}

/// Fraction of `t ∈ [−T, T]` with `log L_f(σ + it) ∈ R`.
pub fn empirical_w_automorphic(
    form: &PrimitiveFormData,
    sigma: f64,
    t_max: f64,
    step: f64,
    r: &RectangleRegion,
    tail_tolerance: f64,
) -> Result<f64> {
    Ok(AutomorphicSamples::new(form, sigma, t_max, step, tail_tolerance)?.fraction(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta() -> PrimitiveFormData {
        PrimitiveFormData::ramanujan_delta(2000).unwrap()
    }

    fn grid(f: &PrimitiveFormData, sigma: f64, primes: &[u64], n: usize) -> GridSpec {
        GridSpec::centered(1.2 * automorphic_support_radius(f, sigma, primes).unwrap(), n).unwrap()
    }

    #[test]
    fn density_matches_torus_monte_carlo() {
        let f = delta();
        let primes = primes_up_to(100).unwrap().into_vec();
        let spec = grid(&f, 1.0, &primes, 256);
        let d = automorphic_density(&f, 1.0, &primes, spec, &ConstructionOptions::default()).unwrap();
        assert!((d.mass() - 1.0).abs() < 1e-3);
        assert!(d.max_conjugation_asymmetry().unwrap() < 1e-3);
        // direct Monte Carlo counts, independent of any binning
        let cs = curves(&f, 1.0, &primes).unwrap();
        let panel = RectangleRegion::random_panel(9, 10, &d.moment_box(3.0));
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        let n = 1_000_000;
        let mut hits = vec![0usize; panel.len()];
        for _ in 0..n {
            let w: Complex64 = cs.iter().map(|c| c.point(rng.gen::<f64>())).sum();
            hits.iter_mut().zip(&panel).filter(|(_, r)| r.contains(w)).for_each(|(h, _)| *h += 1);
        }
        for (r, h) in panel.iter().zip(hits) {
            let (a, b) = (d.integrate_rectangle(r), h as f64 / n as f64);
            assert!((a - b).abs() < 0.01, "{r:?}: {a} vs {b}");
        }
        let mc = automorphic_torus_histogram(&f, 1.0, &primes, 200_000, 5, spec).unwrap();
        assert!((mc.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slow_decay_is_a_precondition_error() {
        let f = delta();
        let spec = grid(&f, 1.0, &[2, 3, 5], 64);
        assert!(matches!(
            automorphic_density(&f, 1.0, &[2, 3, 5], spec, &ConstructionOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn vertical_fraction_basics() {
        let f = delta();
        let s = AutomorphicSamples::new(&f, 1.5, 100.0, 0.1, 0.05).unwrap();
        assert!(s.tail_bound <= 0.05);
        let all = RectangleRegion::new(-50.0, 50.0, -50.0, 50.0).unwrap();
        assert!((s.fraction(&all) - 1.0).abs() < 1e-12);
        assert_eq!(s.fraction(&RectangleRegion::new(10.0, 11.0, 10.0, 11.0).unwrap()), 0.0);
        assert!(matches!(AutomorphicSamples::new(&f, 1.5, 10.0, 0.1, 1e-6), Err(Error::Precision(_))));
        assert!(AutomorphicSamples::new(&f, 1.0, 10.0, 0.1, 0.05).is_err());
    }

    #[test]
    fn tail_bound_dominates_prime_sum() {
        let primes = primes_up_to(200_000).unwrap().into_vec();
        for (sigma, x) in [(1.5, 100.0), (2.0, 1000.0)] {
            let tail: f64 = primes.iter().filter(|&&p| p as f64 > x).map(|&p| 4.0 * (p as f64).powf(-sigma)).sum();
            assert!(tail < euler_tail_bound(sigma, x));
        }
    }
}
