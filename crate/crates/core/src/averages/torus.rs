use super::observable::Observable;
use crate::parallel;
use crate::quadrature::ClosedCurve;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct TorusOptions {
    /// Lattice size for dimensions up to `qmc_max_dim` (a prime).
    pub qmc_points: u64,
    pub qmc_max_dim: usize,
    /// Generator candidates scored by the `P₂` criterion.
    pub qmc_candidates: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for TorusOptions {
    fn default() -> Self {
        Self { qmc_points: 131_071, qmc_max_dim: 8, qmc_candidates: 128, mc_samples: 1 << 22, seed: 0 }
    }
}

/// `P₂` figure of merit of the rank-1 lattice with generator
/// `(1, a, a², …) mod n`; smaller is better.
fn p2_criterion(n: u64, a: u64, dim: usize) -> f64 {
    let mut gen = vec![1u64; dim];
    for j in 1..dim {
        gen[j] = (gen[j - 1] as u128 * a as u128 % n as u128) as u64;
    }
    let b2 = |x: f64| x * x - x + 1.0 / 6.0;
    let sum: f64 = parallel::map_chunks(n as usize, 4096, |_, r| {
        r.map(|k| {
            gen.iter()
                .map(|&g| 1.0 + 2.0 * PI * PI * b2(((k as u128 * g as u128) % n as u128) as f64 / n as f64))
                .product::<f64>()
        })
        .sum::<f64>()
    })
    .into_iter()
    .sum();
    sum / n as f64 - 1.0
}

/// Korobov generator chosen among seeded random candidates by `P₂`.
pub fn korobov_generator(n: u64, dim: usize, candidates: usize, seed: u64) -> u64 {
    if dim <= 1 {
        return 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::INFINITY, 1);
    for _ in 0..candidates.max(1) {
        let a = rng.gen_range(2..n - 1);
        let score = p2_criterion(n, a, dim);
        if score < best.0 {
            best = (score, a);
        }
    }
    best.1
}

/// `∫_{T^d} Φ(Σ_j w_j(θ_j)) dθ` over the torus, one circle per curve.
///
/// Up to `qmc_max_dim` curves a randomly shifted Korobov lattice is used;
/// beyond that, plain Monte Carlo with seeded streams per chunk.
pub fn torus_integral<C, O>(curves: &[C], phi: &O, opts: &TorusOptions) -> Result<Complex64>
where
    C: ClosedCurve,
    O: Observable + ?Sized,
{
    let d = curves.len();
    if d == 0 {
        return Ok(phi.eval(Complex64::new(0.0, 0.0)));
    }
    let eval = |theta: &dyn Fn(usize) -> f64| phi.eval(curves.iter().enumerate().map(|(j, c)| c.point(theta(j))).sum());
    if d <= opts.qmc_max_dim {
        let n = opts.qmc_points;
        if n < 3 {
            return Err(Error::Domain("lattice needs at least 3 points".into()));
        }
        let a = korobov_generator(n, d, opts.qmc_candidates, opts.seed);
        let mut gen = vec![1u64; d];
        for j in 1..d {
            gen[j] = (gen[j - 1] as u128 * a as u128 % n as u128) as u64;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(1);
        let shift: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
        let sum = parallel::chunked_sum(n as usize, 4096, |k| {
            eval(&|j| {
                let x = ((k as u128 * gen[j] as u128) % n as u128) as f64 / n as f64 + shift[j];
                x - x.floor()
            })
        });
        Ok(sum / n as f64)
    } else {
        let n = opts.mc_samples;
        if n == 0 {
            return Err(Error::EmptyDomain("no Monte Carlo samples".into()));
        }
        let sums = parallel::map_chunks(n, 1 << 16, |c, r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(c as u64 + 2);
            let mut s = Complex64::new(0.0, 0.0);
            let mut theta = vec![0.0; d];
            for _ in r {
                theta.iter_mut().for_each(|t| *t = rng.gen());
                s += eval(&|j| theta[j]);
            }
            s
        });
        Ok(sums.into_iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b) / n as f64)
    }
}
