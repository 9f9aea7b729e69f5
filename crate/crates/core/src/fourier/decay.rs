use super::charfn::ProductCharFunction;
use crate::euler::PrimeCurve;
use crate::parallel;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Relative growth of the running maximum allowed between the last two
/// radius octaves for the constant to count as stable.
pub const STABILITY_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct OctaveRatio {
    pub radius_min: f64,
    pub radius_max: f64,
    /// Largest ratio with `|z|` in this octave.
    pub max_ratio: f64,
    /// Largest ratio with `|z|` up to the end of this octave.
    pub running_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimeDecay {
    pub p: u64,
    /// Empirical constant: `max |factor|·p^{−σ/2}|z|^{1/2}` over all samples.
    pub max_ratio: f64,
    pub octaves: Vec<OctaveRatio>,
    pub stable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct JwDecayReport {
    pub sigma: f64,
    pub directions: usize,
    pub radii: Vec<f64>,
    pub per_prime: Vec<PrimeDecay>,
    /// Least-squares slope of `ln|∏ factors|` against `ln|z|` over the
    /// samples with `10 ≤ |z| ≤ 1000`, when at least two such radii exist.
    pub product_exponent: Option<f64>,
}

/// Unit directions `e^{iπ(2k+1)/m}`, offset by half a step from the axes.
fn directions(m: usize) -> Vec<Complex64> {
    (0..m).map(|k| Complex64::from_polar(1.0, PI * (2 * k + 1) as f64 / m as f64)).collect()
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::EmptyDomain("no radii".into()));
    }
    if radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("radii must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Slope of the least-squares line through `(x, y)`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    sxy / sxx
}

/// Samples every prime factor on `radii × directions` and reports the
/// single-prime decay constants and the product decay exponent.
pub fn jw_decay_report(primes: &[u64], sigma: f64, radii: &[f64], n_directions: usize) -> Result<JwDecayReport> {
    check_radii(radii)?;
    if n_directions == 0 {
        return Err(Error::EmptyDomain("no directions".into()));
    }
    let curves = primes.iter().map(|&p| PrimeCurve::new(p, sigma)).collect::<Result<Vec<_>>>()?;
    let scales: Vec<f64> = curves.iter().map(|c| (c.p as f64).powf(-sigma / 2.0)).collect();
    let product = ProductCharFunction::new(curves, *radii.last().unwrap());
    let dirs = directions(n_directions);
    let samples = parallel::try_map_indexed(radii.len() * n_directions, |k| {
        product.factors(dirs[k % n_directions] * radii[k / n_directions])
    })?;

    let r0 = radii[0];
    let octave_of = |r: f64| ((r / r0).log2() + 1e-12).floor() as usize;
    let n_oct = octave_of(*radii.last().unwrap()) + 1;
    let per_prime = primes
        .iter()
        .enumerate()
        .map(|(q, &p)| {
            let mut oct_max = vec![f64::NAN; n_oct];
            for (k, f) in samples.iter().enumerate() {
                let r = radii[k / n_directions];
                let ratio = f[q].norm() * scales[q] * r.sqrt();
                let o = octave_of(r);
                oct_max[o] = if oct_max[o].is_nan() { ratio } else { oct_max[o].max(ratio) };
            }
            let mut running = 0.0_f64;
            let octaves: Vec<OctaveRatio> = oct_max
                .iter()
                .enumerate()
                .filter(|(_, m)| !m.is_nan())
                .map(|(o, &m)| {
                    running = running.max(m);
                    OctaveRatio {
                        radius_min: r0 * 2f64.powi(o as i32),
                        radius_max: r0 * 2f64.powi(o as i32 + 1),
                        max_ratio: m,
                        running_max: running,
                    }
                })
                .collect();
            let stable = match octaves.as_slice() {
                [.., a, b] => b.running_max <= a.running_max * (1.0 + STABILITY_THRESHOLD),
                _ => true,
            };
            PrimeDecay { p, max_ratio: running, octaves, stable }
        })
        .collect();

    let fit: Vec<(f64, f64)> = samples
        .iter()
        .enumerate()
        .filter(|(k, _)| (10.0..=1000.0).contains(&radii[k / n_directions]))
        .filter_map(|(k, f)| {
            let m: f64 = f.iter().map(|x| x.norm()).product();
            (m > 0.0).then(|| (radii[k / n_directions].ln(), m.ln()))
        })
        .collect();
    let distinct = radii.iter().filter(|r| (10.0..=1000.0).contains(*r)).count();
    let product_exponent = (distinct >= 2).then(|| least_squares_slope(&fit));
    Ok(JwDecayReport { sigma, directions: n_directions, radii: radii.to_vec(), per_prime, product_exponent })
}

/// `n` log-spaced radii from `r_min` to `r_max` inclusive.
pub fn log_spaced(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![r_min];
    }
    let (a, b) = (r_min.ln(), r_max.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// Pointwise least-squares slope of `ln|M̃_{σ,P}(z)|` against `ln|z|` over
/// `n_radii` log-spaced radii in `[r_min, r_max]` and `n_directions`
/// directions.
pub fn fit_decay_exponent(
    primes: &[u64],
    sigma: f64,
    r_min: f64,
    r_max: f64,
    n_radii: usize,
    n_directions: usize,
) -> Result<f64> {
    if !(r_min > 0.0 && r_max > r_min) || n_radii < 2 || n_directions == 0 {
        return Err(Error::Domain("need 0 < r_min < r_max, at least two radii and one direction".into()));
    }
    let radii = log_spaced(r_min, r_max, n_radii);
    let product = ProductCharFunction::for_primes(primes, sigma, r_max)?;
    let dirs = directions(n_directions);
    let values = parallel::try_map_indexed(n_radii * n_directions, |k| {
        product.eval(dirs[k % n_directions] * radii[k / n_directions])
    })?;
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(k, v)| (radii[k / n_directions].ln(), v.norm().ln()))
        .collect();
    Ok(least_squares_slope(&pts))
}
