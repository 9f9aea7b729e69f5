use crate::{parallel, Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `B_2, B_4, …, B_30`.
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Euler–Maclaurin parameters.
#[derive(Debug, Clone, Copy)]
pub struct ZetaConfig {
    /// Number of Bernoulli correction terms (1..=14).
    pub order: usize,
    /// Target absolute error of `ζ(s)`.
    pub tolerance: f64,
    /// Largest main-sum length before giving up with a precision error.
    pub max_terms: usize,
}

impl Default for ZetaConfig {
    fn default() -> Self {
        Self { order: 8, tolerance: 1e-10, max_terms: 50_000_000 }
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Smallest main-sum length `N` for which the Euler–Maclaurin remainder
/// bound `|s+2m+1|/(σ+2m+1) · |T_{m+1}|` is below the tolerance.
fn cutoff(s: Complex64, cfg: &ZetaConfig) -> Result<usize> {
    let m = cfg.order;
    if m == 0 || m >= BERNOULLI_EVEN.len() {
        return Err(Error::Domain(format!("Euler–Maclaurin order {m} outside 1..=14")));
    }
    let ln_prod: f64 = (0..=2 * m).map(|j| (s + j as f64).norm().ln()).sum();
    let ln_coef = BERNOULLI_EVEN[m].abs().ln() - ln_factorial(2 * m + 2)
        + ln_prod
        + (s + (2 * m + 1) as f64).norm().ln()
        - (s.re + (2 * m + 1) as f64).ln();
    let exponent = s.re + (2 * m + 1) as f64;
    let n = ((ln_coef - cfg.tolerance.ln()) / exponent).exp().ceil();
    if !n.is_finite() || n > cfg.max_terms as f64 {
        return Err(Error::Precision(format!(
            "ζ({s}) needs {n:.3e} terms for tolerance {:.1e}",
            cfg.tolerance
        )));
    }
    Ok((n as usize).max(10))
}

/// `N^{1−s}/(s−1) + N^{−s}/2 + Σ_k B_{2k}/(2k)! · N^{1−s−2k} · s(s+1)…(s+2k−2)`.
fn em_tail(s: Complex64, n: usize, order: usize) -> Complex64 {
    let nf = n as f64;
    let n_pow = (-s * nf.ln()).exp();
    let mut tail = n_pow * nf / (s - 1.0) + n_pow * 0.5;
    let mut rising = s;
    let mut fact = 2.0;
    let mut power = n_pow / nf;
    for k in 1..=order {
        tail += rising * power * (BERNOULLI_EVEN[k - 1] / fact);
        let kf = k as f64;
        rising *= (s + (2.0 * kf - 1.0)) * (s + 2.0 * kf);
        fact *= (2.0 * kf + 1.0) * (2.0 * kf + 2.0);
        power /= nf * nf;
    }
    tail
}

fn check_argument(s: Complex64) -> Result<()> {
    if s.re <= 0.0 {
        return Err(Error::Domain(format!("Re s = {} must be positive", s.re)));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    Ok(())
}

/// `ζ(s)` for `Re s > 0`, `s ≠ 1`, with the configured absolute error.
pub fn zeta(s: Complex64, cfg: &ZetaConfig) -> Result<Complex64> {
    check_argument(s)?;
    let n = cutoff(s, cfg)?;
    let head: Complex64 = (1..n).map(|k| (-s * (k as f64).ln()).exp()).sum();
    Ok(head + em_tail(s, n, cfg.order))
}

/// `ζ(σ + it)` with the default configuration.
pub fn zeta_eval(sigma: f64, t: f64) -> Result<Complex64> {
    zeta(Complex64::new(sigma, t), &ZetaConfig::default())
}

const LINE_BLOCK: usize = 256;

/// `ζ(σ + i(t0 + k·step))` for `k = 0..count`.
///
/// Within a block of consecutive ordinates the main sum advances every
/// `n^{−it}` by one complex rotation instead of a fresh `sin_cos`.
pub fn zeta_on_line(
    sigma: f64,
    t0: f64,
    step: f64,
    count: usize,
    cfg: &ZetaConfig,
) -> Result<Vec<Complex64>> {
    if sigma <= 0.0 {
        return Err(Error::Domain(format!("σ = {sigma} must be positive")));
    }
    let blocks = parallel::map_chunks(count, LINE_BLOCK, |_, range| -> Result<Vec<Complex64>> {
        let ts: Vec<f64> = range.clone().map(|k| t0 + k as f64 * step).collect();
        let mut n_max = 10;
        for &t in &ts {
            check_argument(Complex64::new(sigma, t))?;
        }
        for &t in [ts[0], ts[ts.len() - 1]].iter() {
            n_max = n_max.max(cutoff(Complex64::new(sigma, t), cfg)?);
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); ts.len()];
        for k in 1..n_max {
            let ln_k = (k as f64).ln();
            let amp = (-sigma * ln_k).exp();
            let mut phasor = Complex64::from_polar(amp, -ts[0] * ln_k);
            let rot = Complex64::from_polar(1.0, -step * ln_k);
            for a in acc.iter_mut() {
                *a += phasor;
                phasor *= rot;
            }
        }
        for (a, &t) in acc.iter_mut().zip(&ts) {
            *a += em_tail(Complex64::new(sigma, t), n_max, cfg.order);
        }
        Ok(acc)
    });
    let mut out = Vec::with_capacity(count);
    for b in blocks {
        out.extend(b?);
    }
    Ok(out)
}

/// How `log ζ` is continued along a vertical line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchMode {
    /// `σ > 1` only: the branch agrees with the absolutely convergent
    /// Euler sum.
    Default,
    /// `1/2 < σ ≤ 1` allowed; the branch is tracked continuously from
    /// `σ = 2` and along the line, and samples where tracking fails are
    /// flagged.
    Experimental,
}

/// `log ζ(σ + it)` on a uniform `t`-grid.
#[derive(Debug, Clone)]
pub struct LogZetaLine {
    pub sigma: f64,
    pub t: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Samples where branch tracking failed (suspected nearby zero).
    pub flagged: Vec<bool>,
}

impl LogZetaLine {
    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|&&f| f).count()
    }
}

const ZERO_GUARD: f64 = 1e-8;
const MAX_REFINE_DEPTH: usize = 14;
const TRACKING_START: f64 = 2.0;

/// Continues a branch of `log ζ` from `a` to `b`, bisecting until every
/// phase increment is below `π/2`.
fn link(
    a: Complex64,
    za: Complex64,
    la: Complex64,
    b: Complex64,
    zb: Complex64,
    depth: usize,
    cfg: &ZetaConfig,
) -> Option<Complex64> {
    if zb.norm() < ZERO_GUARD {
        return None;
    }
    let d = (zb / za).arg();
    if d.abs() < PI / 2.0 {
        return Some(Complex64::new(zb.norm().ln(), la.im + d));
    }
    if depth >= MAX_REFINE_DEPTH {
        return None;
    }
    let mid = (a + b) * 0.5;
    let zm = zeta(mid, cfg).ok()?;
    let lm = link(a, za, la, mid, zm, depth + 1, cfg)?;
    link(mid, zm, lm, b, zb, depth + 1, cfg)
}

/// Branch of `log ζ(σ+it)` obtained by continuing leftwards from `σ = 2`,
/// where the principal value is correct (`|Im log ζ| ≤ log ζ(2) < π/2`).
fn horizontal_log(sigma: f64, t: f64, cfg: &ZetaConfig) -> Option<Complex64> {
    let start = Complex64::new(TRACKING_START.max(sigma), t);
    let mut z_prev = zeta(start, cfg).ok()?;
    let mut l_prev = z_prev.ln();
    if sigma >= TRACKING_START {
        return Some(l_prev);
    }
    let steps = ((TRACKING_START - sigma) / 0.05).ceil() as usize;
    let mut s_prev = start;
    for k in 1..=steps {
        let s = Complex64::new(TRACKING_START - (TRACKING_START - sigma) * k as f64 / steps as f64, t);
        let z = zeta(s, cfg).ok()?;
        l_prev = link(s_prev, z_prev, l_prev, s, z, 0, cfg)?;
        s_prev = s;
        z_prev = z;
    }
    Some(l_prev)
}

/// `log ζ(σ+it)` for `t = t_min, t_min + step, …, t_max`, continuous in `t`.
pub fn log_zeta_line(
    sigma: f64,
    t_min: f64,
    t_max: f64,
    step: f64,
    mode: BranchMode,
    cfg: &ZetaConfig,
) -> Result<LogZetaLine> {
    match mode {
        BranchMode::Default if sigma <= 1.0 => {
            return Err(Error::Domain(format!(
                "σ = {sigma}: default branch mode requires σ > 1 (use experimental mode)"
            )))
        }
        BranchMode::Experimental if sigma <= 0.5 => {
            return Err(Error::Domain(format!("σ = {sigma}: branch tracking requires σ > 1/2")))
        }
        _ => {}
    }
    if !(step > 0.0) || t_max < t_min {
        return Err(Error::Domain(format!("bad grid [{t_min}, {t_max}] step {step}")));
    }
    let count = ((t_max - t_min) / step).round() as usize + 1;
    let t: Vec<f64> = (0..count).map(|k| t_min + k as f64 * step).collect();
    let z = zeta_on_line(sigma, t_min, step, count, cfg)?;

    // anchor: nearest point to t = 0, avoiding the real segment through the
    // pole when σ ≤ 1
    let anchor = {
        let admissible = |tk: f64| sigma > 1.0 || tk.abs() >= 1.0;
        (0..count)
            .filter(|&k| admissible(t[k]))
            .min_by(|&a, &b| t[a].abs().total_cmp(&t[b].abs()))
            .unwrap_or_else(|| {
                (0..count).max_by(|&a, &b| t[a].abs().total_cmp(&t[b].abs())).unwrap()
            })
    };

    let mut values = vec![Complex64::new(f64::NAN, f64::NAN); count];
    let mut flagged = vec![false; count];
    match horizontal_log(sigma, t[anchor], cfg) {
        Some(l) => values[anchor] = l,
        None => flagged[anchor] = true,
    }
    let s_at = |k: usize| Complex64::new(sigma, t[k]);
    let mut walk = |order: &mut dyn Iterator<Item = (usize, usize)>| {
        for (from, to) in order {
            if flagged[from] {
                // re-anchor after a failure
                match horizontal_log(sigma, t[to], cfg) {
                    Some(l) => values[to] = l,
                    None => flagged[to] = true,
                }
            } else {
                match link(s_at(from), z[from], values[from], s_at(to), z[to], 0, cfg) {
                    Some(l) => values[to] = l,
                    None => flagged[to] = true,
                }
            }
        }
    };
    walk(&mut (anchor..count.saturating_sub(1)).map(|k| (k, k + 1)));
    walk(&mut (1..=anchor).rev().map(|k| (k, k - 1)));

    Ok(LogZetaLine { sigma, t, values, flagged })
}
