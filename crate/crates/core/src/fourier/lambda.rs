use crate::euler::primes_up_to;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// `λ_z(n)` for `n ≤ N`: the Dirichlet coefficients of `ζ(s)^{iz/2}`,
/// multiplicative with `λ_z(p^k) = (iz/2)_k / k!`.
#[derive(Debug, Clone)]
pub struct LambdaTable {
    pub z: Complex64,
    coefficients: Vec<Complex64>,
}

impl LambdaTable {
    pub fn n_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn get(&self, n: usize) -> Complex64 {
        self.coefficients[n]
    }

    /// Coefficients indexed from 1 (`[0]` is unused and zero).
    pub fn as_slice(&self) -> &[Complex64] {
        &self.coefficients
    }
}

/// `(iz/2)_k / k!` for `k = 0..=k_max`.
pub fn prime_power_coefficients(z: Complex64, k_max: usize) -> Vec<Complex64> {
    let a = Complex64::new(0.0, 0.5) * z;
    let mut c = Vec::with_capacity(k_max + 1);
    c.push(Complex64::new(1.0, 0.0));
    for k in 1..=k_max {
        let prev = c[k - 1];
        c.push(prev * (a + (k - 1) as f64) / k as f64);
    }
    c
}

/// Smallest prime factor of every `n ≤ limit` (`spf[0] = spf[1] = 0`).
fn smallest_prime_factors(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            for m in (i..=limit).step_by(i) {
                if spf[m] == 0 {
                    spf[m] = i as u32;
                }
            }
        }
    }
    spf
}

pub fn lambda_coefficients(z: Complex64, n_max: usize) -> Result<LambdaTable> {
    if n_max == 0 {
        return Err(Error::EmptyDomain("λ table needs N ≥ 1".into()));
    }
    let spf = smallest_prime_factors(n_max);
    let k_max = (usize::BITS - n_max.leading_zeros()) as usize;
    let c = prime_power_coefficients(z, k_max);
    let mut coefficients = vec![Complex64::new(0.0, 0.0); n_max + 1];
    coefficients[1] = Complex64::new(1.0, 0.0);
    for n in 2..=n_max {
        let p = spf[n] as usize;
        let (mut m, mut k) = (n / p, 1);
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        coefficients[n] = c[k] * coefficients[m];
    }
    Ok(LambdaTable { z, coefficients })
}

/// A truncated Dirichlet series with an estimate of the neglected tail.
#[derive(Debug, Clone, Serialize)]
pub struct DirichletSum {
    pub value: Complex64,
    pub terms: usize,
    pub tail_estimate: f64,
    pub warning: Option<String>,
}

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-6;

/// `Σ_{n≤N} λ_z(n) λ_{z̄}(n) n^{−2σ}`, optionally over `P`-smooth `n` only.
pub fn mtilde_dirichlet(sigma: f64, z: Complex64, n_max: usize, smooth: Option<&[u64]>) -> Result<DirichletSum> {
    generalized_sum(Complex64::new(sigma, 0.0), z, z.conj(), n_max, smooth)
}

/// `Σ_{n≤N} λ_{z₁}(n) λ_{z₂}(n) n^{−2s}`.
pub fn generalized_mtilde(s: Complex64, z1: Complex64, z2: Complex64, n_max: usize) -> Result<DirichletSum> {
    generalized_sum(s, z1, z2, n_max, None)
}

fn generalized_sum(s: Complex64, z1: Complex64, z2: Complex64, n_max: usize, smooth: Option<&[u64]>) -> Result<DirichletSum> {
    if s.re <= 0.5 {
        return Err(Error::Domain(format!("Re s = {} must exceed 1/2", s.re)));
    }
    let l1 = lambda_coefficients(z1, n_max)?;
    let l2 = lambda_coefficients(z2, n_max)?;
    let allowed: Option<Vec<bool>> = smooth.map(|primes| smooth_mask(primes, n_max));
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut terms = 0;
    for n in 1..=n_max {
        if let Some(mask) = &allowed {
            if !mask[n] {
                continue;
            }
        }
        let t = l1.get(n) * l2.get(n) * (-2.0 * s * (n as f64).ln()).exp();
        value += t;
        abs_sum += t.norm();
        terms += 1;
    }
    let tail_estimate = match smooth {
        // the P-smooth absolute series is a finite Euler product
        Some(primes) => (smooth_absolute_total(s.re, z1, z2, primes) - abs_sum).max(0.0),
        None => rankin_tail(s.re, z1, z2, n_max),
    };
    let warning = (tail_estimate > DEFAULT_TAIL_TOLERANCE).then(|| {
        format!("tail estimate {tail_estimate:.3e} exceeds {DEFAULT_TAIL_TOLERANCE:.0e}; increase N")
    });
    Ok(DirichletSum { value, terms, tail_estimate, warning })
}

fn smooth_mask(primes: &[u64], n_max: usize) -> Vec<bool> {
    let mut mask = vec![false; n_max + 1];
    mask[1] = true;
    // multiply up from 1 by the allowed primes
    for &p in primes {
        let p = p as usize;
        for n in 1..=n_max / p.max(1) {
            if mask[n] {
                mask[n * p] = true;
            }
        }
    }
    mask
}

/// `∏_{p∈P} Σ_k |λ_{z₁}(p^k) λ_{z₂}(p^k)| p^{−2kσ}`.
fn smooth_absolute_total(sigma: f64, z1: Complex64, z2: Complex64, primes: &[u64]) -> f64 {
    let a = absolute_coefficients(z1, z2);
    primes.iter().map(|&p| 1.0 + local_sum(&a, (p as f64).powf(-2.0 * sigma))).product()
}

const K_MAX: usize = 200;

fn absolute_coefficients(z1: Complex64, z2: Complex64) -> Vec<f64> {
    let c1 = prime_power_coefficients(z1, K_MAX);
    let c2 = prime_power_coefficients(z2, K_MAX);
    c1.iter().zip(&c2).map(|(x, y)| x.norm() * y.norm()).collect()
}

/// `Σ_{k≥1} a_k x^k`, stopped once terms are negligible.
fn local_sum(a: &[f64], x: f64) -> f64 {
    let mut local = 0.0;
    let mut xk = 1.0;
    for ak in a.iter().skip(1) {
        xk *= x;
        let t = ak * xk;
        local += t;
        if t < 1e-18 * local {
            break;
        }
    }
    local
}

/// Rankin's trick: `Σ_{n>N} |a_n| n^{−2σ} ≤ N^{−δ} ∏_p Σ_k |a_{p^k}| p^{k(δ−2σ)}`,
/// minimised over a grid of `δ ∈ (0, 2σ − 1)`. The product runs over primes
/// up to `10^5`; larger primes are bounded by their first-order term.
fn rankin_tail(sigma: f64, z1: Complex64, z2: Complex64, n_max: usize) -> f64 {
    const LIMIT: u64 = 100_000;
    let a = absolute_coefficients(z1, z2);
    let primes = primes_up_to(LIMIT).map(|p| p.into_vec()).unwrap_or_default();
    let mut best = f64::INFINITY;
    for frac in (1..20).map(|k| k as f64 / 20.0) {
        let delta = frac * (2.0 * sigma - 1.0);
        let mut log_prod: f64 = primes.iter().map(|&p| local_sum(&a, (p as f64).powf(delta - 2.0 * sigma)).ln_1p()).sum();
        // Σ_{p>Y} a_1 p^{−e} ≤ a_1 Y^{1−e} / ((e − 1) ln Y), e = 2σ − δ, doubled for higher powers
        let e = 2.0 * sigma - delta;
        let y = LIMIT as f64;
        log_prod += 2.0 * a[1] * y.powf(1.0 - e) / ((e - 1.0) * y.ln());
        best = best.min((log_prod - delta * (n_max as f64).ln()).exp());
    }
    best
}
