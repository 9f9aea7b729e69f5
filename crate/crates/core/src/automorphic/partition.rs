use super::curve::{automorphic_curve, AutomorphicCurve};
use crate::euler::PrimitiveFormData;
use crate::quadrature::pairing;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// θ-samples used to certify the partition bounds.
pub const PARTITION_SAMPLES: usize = 1 << 14;

/// Threshold candidates tried for the `|g'|` cut.
const CANDIDATES: usize = 64;

/// A split of `[0, 1)` into `I₁`, where `|g'|` is bounded below, and `I₂`,
/// where `|g''|` is, for `g(θ) = ⟨w, z(θ)⟩`.
#[derive(Debug, Clone, Serialize)]
pub struct DerivativePartition {
    pub p: u64,
    pub w: Complex64,
    /// `|g'|` cut used to assign cells to `I₁`.
    pub kappa: f64,
    /// Maximal half-open intervals of `I₁`.
    pub first: Vec<(f64, f64)>,
    pub second: Vec<(f64, f64)>,
    /// Certified `min |g'|` on `I₁` (infinite if `I₁` is empty).
    pub first_bound: f64,
    /// Certified `min |g''|` on `I₂` (infinite if `I₂` is empty).
    pub second_bound: f64,
    /// Cell membership: `true` for `I₁`.
    pub cells: Vec<bool>,
}

impl DerivativePartition {
    pub fn both_positive(&self) -> bool {
        self.first_bound > 0.0 && self.second_bound > 0.0
    }

    pub fn total_length(&self) -> f64 {
        self.first.iter().chain(&self.second).map(|(a, b)| b - a).sum()
    }
}

/// Partition for `p ∈ P_f(ε)`; other primes are a precondition error.
pub fn derivative_partition(
    form: &PrimitiveFormData,
    p: u64,
    sigma: f64,
    w: Complex64,
    epsilon: f64,
) -> Result<DerivativePartition> {
    let lambda = form.lambda(p)?;
    let threshold = 2f64.sqrt() - epsilon;
    if !(lambda.abs() > threshold) {
        return Err(Error::Precondition(format!(
            "p = {p} is not in P_f({epsilon}): |λ(p)| = {:.6} ≤ {threshold:.6}",
            lambda.abs()
        )));
    }
    derivative_partition_unchecked(form, p, sigma, w)
}

/// Partition without the `P_f(ε)` membership check.
///
/// On each of `2^14` cells the values of `|g'|` and `|g''|` at the endpoints
/// are padded by Lipschitz bounds (`max|g''|·h/2` and `max|g'''|·h/2`) to
/// certified cell minima. Cells whose certified `|g'|` reaches the cut `κ`
/// form `I₁`, the rest `I₂`; `κ` is chosen among quantiles of `|g'|` to
/// maximise the smaller of the two bounds.
pub fn derivative_partition_unchecked(
    form: &PrimitiveFormData,
    p: u64,
    sigma: f64,
    w: Complex64,
) -> Result<DerivativePartition> {
    if w == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("w must be nonzero".into()));
    }
    let curve = automorphic_curve(form, p, sigma)?;
    let n = PARTITION_SAMPLES;
    let h = 1.0 / n as f64;
    let g1: Vec<f64> = (0..=n).map(|j| pairing(w, curve.derivative(j as f64 * h)).abs()).collect();
    let g2: Vec<f64> = (0..=n).map(|j| pairing(w, curve.second_derivative(j as f64 * h)).abs()).collect();
    let (l2, l3) = curve.derivative_bounds();
    let pad1 = w.norm() * l2 * h / 2.0;
    let pad2 = w.norm() * l3 * h / 2.0;
    let cell1: Vec<f64> = (0..n).map(|j| (g1[j].min(g1[j + 1]) - pad1).max(0.0)).collect();
    let cell2: Vec<f64> = (0..n).map(|j| (g2[j].min(g2[j + 1]) - pad2).max(0.0)).collect();

    let mut sorted: Vec<f64> = cell1.iter().copied().filter(|&x| x > 0.0).collect();
    sorted.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64, f64, f64)> = None;
    let mut consider = |kappa: f64| {
        let mut b1 = f64::INFINITY;
        let mut b2 = f64::INFINITY;
        for j in 0..n {
            if kappa > 0.0 && cell1[j] >= kappa {
                b1 = b1.min(cell1[j]);
            } else {
                b2 = b2.min(cell2[j]);
            }
        }
        let score = b1.min(b2);
        if best.map_or(true, |(s, ..)| score > s) {
            best = Some((score, kappa, b1, b2));
        }
    };
    consider(0.0);
    for k in 0..CANDIDATES {
        if let Some(&x) = sorted.get(k * sorted.len() / CANDIDATES) {
            consider(x);
        }
    }
    let (_, kappa, first_bound, second_bound) = best.expect("at least one candidate");
    let cells: Vec<bool> = cell1.iter().map(|&x| kappa > 0.0 && x >= kappa).collect();
    let (first, second) = intervals(&cells);
    Ok(DerivativePartition { p, w, kappa, first, second, first_bound, second_bound, cells })
}

/// Maximal runs of equal cell labels as half-open θ-intervals.
fn intervals(cells: &[bool]) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let n = cells.len();
    let (mut first, mut second) = (Vec::new(), Vec::new());
    let mut start = 0;
    for j in 1..=n {
        if j == n || cells[j] != cells[start] {
            let iv = (start as f64 / n as f64, j as f64 / n as f64);
            if cells[start] {
                first.push(iv);
            } else {
                second.push(iv);
            }
            start = j;
        }
    }
    (first, second)
}

/// Angles where the curvature `Im(conj(z')·z'')` changes sign, located on
/// the partition grid.
pub fn inflection_points(curve: &AutomorphicCurve) -> Vec<f64> {
    let n = PARTITION_SAMPLES;
    let k = |t: f64| (curve.derivative(t).conj() * curve.second_derivative(t)).im;
    let vals: Vec<f64> = (0..=n).map(|j| k(j as f64 / n as f64)).collect();
    (0..n)
        .filter(|&j| vals[j].signum() != vals[j + 1].signum())
        .map(|j| {
            // linear interpolation of the zero
            let (a, b) = (vals[j], vals[j + 1]);
            (j as f64 + a / (a - b)) / n as f64
        })
        .collect()
}
