use super::grid::{GridDensity, GridSpec, Provenance};
use crate::euler::neg_log_one_minus;
use crate::parallel;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const CHUNK: usize = 1 << 16;
const CHUNKS_PER_BATCH: usize = 16;

/// `Σ_{p∈P} −log(1 − p^{−σ})`, the largest `|w|` reachable by the torus map.
pub fn support_radius(primes: &[u64], sigma: f64) -> f64 {
    primes.iter().map(|&p| -(-(p as f64).powf(-sigma)).ln_1p()).sum()
}

/// Histogram of the torus map `(θ_p) ↦ −Σ Log(1 − p^{−σ}e^{2πiθ_p})` under
/// Haar measure, from `n_samples` seeded draws.
pub fn torus_histogram(primes: &[u64], sigma: f64, n_samples: usize, seed: u64, spec: GridSpec) -> Result<GridDensity> {
    if primes.len() < 2 {
        return Err(Error::Precondition(format!("torus histogram needs |P| ≥ 2, got {}", primes.len())));
    }
    if sigma <= 0.5 {
        return Err(Error::Domain(format!("σ = {sigma} must exceed 1/2")));
    }
    let radii: Vec<f64> = primes.iter().map(|&p| (p as f64).powf(-sigma)).collect();
    let sample = |rng: &mut ChaCha8Rng| {
        radii
            .iter()
            .map(|&r| neg_log_one_minus(Complex64::from_polar(r, 2.0 * PI * rng.gen::<f64>())))
            .sum()
    };
    let mut d = pushforward_histogram(sample, n_samples, seed, spec, support_radius(primes, sigma))?;
    d.provenance = Provenance {
        method: "torus-monte-carlo".into(),
        seed: Some(seed),
        ..d.provenance
    }
    .with("sigma", sigma)
    .with("primes", primes.len() as f64)
    .with("samples", n_samples as f64);
    Ok(d)
}

/// Bins `n_samples` draws of `sample` into `spec` and normalises to unit
/// mass. Draws are split into chunks of 2^16, chunk `c` using stream `c` of
/// a ChaCha generator keyed by `seed`, so the result does not depend on the
/// thread count. The support disk `|w| ≤ radius` must fit on the grid.
pub(crate) fn pushforward_histogram<F>(
    sample: F,
    n_samples: usize,
    seed: u64,
    spec: GridSpec,
    radius: f64,
) -> Result<GridDensity>
where
    F: Fn(&mut ChaCha8Rng) -> Complex64 + Sync + Send,
{
    if n_samples == 0 {
        return Err(Error::EmptyDomain("no samples requested".into()));
    }
    let cells = spec.resolution * spec.resolution;
    let mut counts = vec![0u64; cells];
    let mut lost = 0u64;
    let ranges = parallel::chunks(n_samples, CHUNK);
    for batch in ranges.chunks(CHUNKS_PER_BATCH) {
        let first = batch[0].start / CHUNK;
        let partial = parallel::map_indexed(batch.len(), |k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((first + k) as u64);
            let mut local = vec![0u32; cells];
            let mut out = 0u64;
            for _ in batch[k].clone() {
                match spec.locate(sample(&mut rng)) {
                    Some((i, j)) => local[j * spec.resolution + i] += 1,
                    None => out += 1,
                }
            }
            (local, out)
        });
        for (local, out) in partial {
            lost += out;
            counts.iter_mut().zip(local).for_each(|(c, l)| *c += l as u64);
        }
    }
    let lost_mass = lost as f64 / n_samples as f64;
    if lost > 0 || !spec.contains_disk(Complex64::new(0.0, 0.0), radius) {
        return Err(Error::Coverage {
            reason: format!("grid does not contain the support disk of radius {radius:.6}"),
            lost_mass,
        });
    }
    let scale = 2.0 * PI / (spec.cell_area() * n_samples as f64);
    let values = counts.into_iter().map(|c| c as f64 * scale).collect();
    GridDensity::from_values(spec, values, Provenance::new("pushforward-histogram"))
}
