//! Periodic trapezoid rule for oscillatory means over closed curves.
//!
//! All characteristic-function factors in this crate have the form
//! `∫₀¹ exp(i⟨z, w(θ)⟩) dθ` with `w` analytic and 1-periodic, for which the
//! trapezoid rule converges geometrically once the node count exceeds the
//! local frequency of the phase.

use crate::{Error, Result};
use num_complex::Complex64;

/// Real inner product `⟨z, w⟩ = Re(z̄ w) = Re z·Re w + Im z·Im w`.
#[inline]
pub fn pairing(z: Complex64, w: Complex64) -> f64 {
    z.re * w.re + z.im * w.im
}

#[derive(Debug, Clone, Copy)]
pub struct TrapezoidConfig {
    /// Stop when two successive refinements differ by less than this.
    pub tolerance: f64,
    pub min_points: usize,
    pub max_points: usize,
}

impl Default for TrapezoidConfig {
    fn default() -> Self {
        Self { tolerance: 1e-12, min_points: 16, max_points: 1 << 22 }
    }
}

/// A closed curve `θ ↦ w(θ)` on `[0, 1)`, optionally backed by a table of
/// `2^k` precomputed points.
pub trait ClosedCurve: Sync {
    fn point(&self, theta: f64) -> Complex64;

    /// Upper bound for `max |w'(θ)| / (2π)`.
    fn speed_bound(&self) -> f64;

    /// Point `j` of an `n`-point uniform grid (`n` a power of two).
    fn grid_point(&self, j: usize, n: usize) -> Complex64 {
        self.point(j as f64 / n as f64)
    }
}

/// Curve with a cached table of `table.len()` (a power of two) uniform samples.
pub struct TabulatedCurve<C> {
    curve: C,
    table: Vec<Complex64>,
}

impl<C: ClosedCurve> TabulatedCurve<C> {
    pub fn new(curve: C, table_size: usize) -> Self {
        let m = table_size.next_power_of_two();
        let table = (0..m).map(|j| curve.point(j as f64 / m as f64)).collect();
        Self { curve, table }
    }

    pub fn inner(&self) -> &C {
        &self.curve
    }
}

impl<C: ClosedCurve> ClosedCurve for TabulatedCurve<C> {
    fn point(&self, theta: f64) -> Complex64 {
        self.curve.point(theta)
    }

    fn speed_bound(&self) -> f64 {
        self.curve.speed_bound()
    }

    fn grid_point(&self, j: usize, n: usize) -> Complex64 {
        let m = self.table.len();
        if n <= m {
            self.table[j * (m / n)]
        } else {
            self.curve.point(j as f64 / n as f64)
        }
    }
}

/// `∫₀¹ exp(i⟨z, w(θ)⟩) dθ` by the periodic trapezoid rule with doubling.
pub fn oscillatory_mean<C: ClosedCurve + ?Sized>(
    curve: &C,
    z: Complex64,
    cfg: &TrapezoidConfig,
) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let phase = |w: Complex64| {
        let (s, c) = pairing(z, w).sin_cos();
        Complex64::new(c, s)
    };
    // the phase changes by at most |z|·speed cycles per unit θ
    let freq = z.norm() * curve.speed_bound();
    let mut n = ((2.0 * freq + 16.0).ceil() as usize)
        .max(cfg.min_points)
        .next_power_of_two();
    if n > cfg.max_points {
        return Err(Error::Precision(format!(
            "oscillatory mean needs more than {} nodes (|z| = {:.3e})",
            cfg.max_points,
            z.norm()
        )));
    }
    let mut sum: Complex64 = (0..n).map(|j| phase(curve.grid_point(j, n))).sum();
    let mut estimate = sum / n as f64;
    loop {
        let m = 2 * n;
        if m > cfg.max_points {
            return Err(Error::Precision(format!(
                "trapezoid rule did not converge to {:.1e} with {} nodes",
                cfg.tolerance, n
            )));
        }
        let odd: Complex64 = (0..n).map(|j| phase(curve.grid_point(2 * j + 1, m))).sum();
        sum += odd;
        let refined = sum / m as f64;
        let diff = (refined - estimate).norm();
        n = m;
        estimate = refined;
        if diff < cfg.tolerance {
            return Ok(estimate);
        }
    }
}
