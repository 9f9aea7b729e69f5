use crate::density::{GridSpec, RectangleRegion};
use crate::euler::PrimeCurve;
use crate::parallel;
use crate::quadrature::{oscillatory_mean, ClosedCurve, TabulatedCurve, TrapezoidConfig};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};

/// Running products below this modulus are returned early.
const UNDERFLOW: f64 = 1e-40;

/// `∫₀¹ exp(i⟨z, w_p(θ)⟩) dθ` for the curve of `p` at abscissa `σ`.
pub fn one_prime_char_factor(p: u64, sigma: f64, z: Complex64) -> Result<Complex64> {
    oscillatory_mean(&PrimeCurve::new(p, sigma)?, z, &TrapezoidConfig::default())
}

/// `∏_{p∈P}` of [`one_prime_char_factor`].
pub fn char_function_p(primes: &[u64], sigma: f64, z: Complex64) -> Result<Complex64> {
    if sigma <= 0.5 {
        return Err(Error::Domain(format!("σ = {sigma} must exceed 1/2")));
    }
    primes.iter().try_fold(Complex64::new(1.0, 0.0), |acc, &p| Ok(acc * one_prime_char_factor(p, sigma, z)?))
}

/// Product of oscillatory means over a fixed family of curves, with each
/// curve tabulated once for repeated evaluation up to `|z| ≤ z_max`.
pub struct ProductCharFunction<C> {
    curves: Vec<TabulatedCurve<C>>,
    cfg: TrapezoidConfig,
}

impl ProductCharFunction<PrimeCurve> {
    pub fn for_primes(primes: &[u64], sigma: f64, z_max: f64) -> Result<Self> {
        if sigma <= 0.5 {
            return Err(Error::Domain(format!("σ = {sigma} must exceed 1/2")));
        }
        let curves = primes.iter().map(|&p| PrimeCurve::new(p, sigma)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(curves, z_max))
    }
}

impl<C: ClosedCurve> ProductCharFunction<C> {
    pub fn new(curves: Vec<C>, z_max: f64) -> Self {
        let curves = curves
            .into_iter()
            .map(|c| {
                let base = (2.0 * z_max * c.speed_bound() + 16.0).ceil() as usize;
                let size = (4 * base.next_power_of_two()).min(1 << 16);
                TabulatedCurve::new(c, size)
            })
            .collect();
        Self { curves, cfg: TrapezoidConfig::default() }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for c in &self.curves {
            acc *= oscillatory_mean(c, z, &self.cfg)?;
            if acc.norm() < UNDERFLOW {
                break;
            }
        }
        Ok(acc)
    }

    /// Individual factors at `z`.
    pub fn factors(&self, z: Complex64) -> Result<Vec<Complex64>> {
        self.curves.iter().map(|c| oscillatory_mean(c, z, &self.cfg)).collect()
    }
}

/// The `z`-grid whose FFT pairs with the `w`-grid `w_spec`: centered at 0,
/// same resolution, half width `nπ/(2W)`.
pub fn dual_spec(w_spec: &GridSpec) -> GridSpec {
    let n = w_spec.resolution;
    GridSpec {
        center: Complex64::new(0.0, 0.0),
        half_width: n as f64 * PI / (2.0 * w_spec.half_width),
        resolution: n,
    }
}

/// Decay summary of a sampled characteristic function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayMetadata {
    /// Largest `|value|` on the outer `n/16` cells of every edge.
    pub boundary_max: f64,
    /// Largest `|z|` with `|value| > tail_tolerance`.
    pub tail_radius: f64,
    pub tail_tolerance: f64,
    pub fitted_exponent: Option<f64>,
}

/// Samples of a characteristic function on a centered `z`-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CharFunctionGrid {
    spec: GridSpec,
    values: Vec<Complex64>,
    pub decay: DecayMetadata,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    center: [f64; 2],
    half_width: f64,
    resolution: usize,
    decay: DecayMetadata,
}

impl CharFunctionGrid {
    pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-6;

    pub fn from_values(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if spec.center != Complex64::new(0.0, 0.0) {
            return Err(Error::GeometryMismatch("z-grid must be centered at 0".into()));
        }
        if values.len() != spec.resolution * spec.resolution {
            return Err(Error::GeometryMismatch(format!("{} values for resolution {}", values.len(), spec.resolution)));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain("non-finite characteristic function value".into()));
        }
        let mut g = Self {
            spec,
            values,
            decay: DecayMetadata {
                boundary_max: 0.0,
                tail_radius: 0.0,
                tail_tolerance: Self::DEFAULT_TAIL_TOLERANCE,
                fitted_exponent: None,
            },
        };
        g.set_tail_tolerance(Self::DEFAULT_TAIL_TOLERANCE);
        Ok(g)
    }

    /// Evaluates `f` at every node.
    pub fn fill<F>(spec: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Result<Complex64> + Sync + Send,
    {
        let n = spec.resolution;
        let values = parallel::try_map_indexed(n * n, |k| f(spec.node(k % n, k / n)))?;
        Self::from_values(spec, values)
    }

    /// Like [`fill`](Self::fill) for functions with `f(z̄) = f(z)` and
    /// `f(−z) = conj f(z)`, i.e. transforms of real measures symmetric under
    /// conjugation. Only the quadrant `a, b ≥ 0` (plus the unpaired first row
    /// and column) is evaluated.
    pub fn fill_symmetric<F>(spec: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Result<Complex64> + Sync + Send,
    {
        let n = spec.resolution;
        let h = n / 2;
        // index of the mirror image, or itself when the mirror is off-grid
        let canon = |k: usize| if k < h && k > 0 { n - k } else { k };
        let reps: Vec<usize> = (0..n * n).filter(|&k| canon(k % n) == k % n && canon(k / n) == k / n).collect();
        let computed = parallel::try_map_indexed(reps.len(), |r| f(spec.node(reps[r] % n, reps[r] / n)))?;
        let mut values = vec![Complex64::new(0.0, 0.0); n * n];
        for (&k, v) in reps.iter().zip(computed) {
            values[k] = v;
        }
        for k in 0..n * n {
            let (i, j) = (k % n, k / n);
            let (ci, cj) = (canon(i), canon(j));
            if (ci, cj) != (i, j) {
                let v = values[cj * n + ci];
                values[k] = if ci != i { v.conj() } else { v };
            }
        }
        Self::from_values(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.spec.resolution + i]
    }

    /// Recomputes the decay metadata against a new tail tolerance.
    pub fn set_tail_tolerance(&mut self, tol: f64) {
        let n = self.spec.resolution;
        let band = n / 16;
        let mut boundary_max: f64 = 0.0;
        let mut tail_radius: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let m = self.value(i, j).norm();
                let edge = i < band || j < band || i >= n - band || j >= n - band;
                if edge {
                    boundary_max = boundary_max.max(m);
                }
                if m > tol {
                    tail_radius = tail_radius.max(self.spec.node(i, j).norm());
                }
            }
        }
        self.decay.boundary_max = boundary_max;
        self.decay.tail_radius = tail_radius;
        self.decay.tail_tolerance = tol;
    }

    /// Region of the `z`-plane covered by the grid.
    pub fn bounds(&self) -> RectangleRegion {
        self.spec.bounds()
    }

    /// CSV with header `a,b,re,im`, `b` outer.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["a", "b", "re", "im"])?;
        let n = self.spec.resolution;
        for j in 0..n {
            let b = self.spec.node_v(j).to_string();
            for i in 0..n {
                let v = self.value(i, j);
                w.write_record([self.spec.node_u(i).to_string(), b.clone(), v.re.to_string(), v.im.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_sidecar<W: Write>(&self, out: W) -> Result<()> {
        let car = Sidecar {
            center: [0.0, 0.0],
            half_width: self.spec.half_width,
            resolution: self.spec.resolution,
            decay: self.decay,
        };
        serde_json::to_writer_pretty(out, &car)?;
        Ok(())
    }

    pub fn read<R1: Read, R2: Read>(csv_in: R1, sidecar_in: R2) -> Result<Self> {
        let car: Sidecar = serde_json::from_reader(sidecar_in)?;
        let spec = GridSpec::new(Complex64::new(car.center[0], car.center[1]), car.half_width, car.resolution)?;
        let mut rdr = csv::Reader::from_reader(csv_in);
        if rdr.headers()?.iter().collect::<Vec<_>>() != ["a", "b", "re", "im"] {
            return Err(Error::Parse { line: 1, message: "expected header a,b,re,im".into() });
        }
        let mut values = Vec::with_capacity(spec.resolution * spec.resolution);
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |c: usize| -> Result<f64> {
                rec.get(c)
                    .unwrap_or("")
                    .parse()
                    .map_err(|e| Error::Parse { line: k + 2, message: format!("column {c}: {e}") })
            };
            values.push(Complex64::new(field(2)?, field(3)?));
        }
        let mut g = Self::from_values(spec, values)?;
        g.set_tail_tolerance(car.decay.tail_tolerance);
        g.decay.fitted_exponent = car.decay.fitted_exponent;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::pairing;

    /// Adaptive Simpson on `[a, b]`.
    fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
        fn rec<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
            }
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
    }

    #[test]
    fn factor_matches_adaptive_simpson() {
        let z = Complex64::new(10.0, 0.0);
        let c = PrimeCurve::new(2, 1.0).unwrap();
        let phase = move |t: f64| pairing(z, c.point(t));
        let re = simpson(move |t| phase(t).cos(), 0.0, 1.0, 1e-13);
        let im = simpson(move |t| phase(t).sin(), 0.0, 1.0, 1e-13);
        let v = one_prime_char_factor(2, 1.0, z).unwrap();
        assert!((v - Complex64::new(re, im)).norm() < 1e-10, "{v} vs {re} {im}");
        assert!(v.norm() <= 1.0);
    }

    #[test]
    fn factor_symmetries() {
        let z = Complex64::new(2.5, -1.75);
        let v = one_prime_char_factor(3, 1.0, z).unwrap();
        assert!((one_prime_char_factor(3, 1.0, z.conj()).unwrap() - v).norm() < 1e-13);
        assert!((one_prime_char_factor(3, 1.0, -z).unwrap() - v.conj()).norm() < 1e-13);
        assert_eq!(one_prime_char_factor(3, 1.0, Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
        assert!(v.im.abs() > 1e-3, "factor is genuinely complex");
    }

    #[test]
    fn product_of_factors() {
        let z = Complex64::new(1.0, 2.0);
        let p = char_function_p(&[2, 3, 5], 1.0, z).unwrap();
        let q: Complex64 = [2, 3, 5].iter().map(|&p| one_prime_char_factor(p, 1.0, z).unwrap()).product();
        assert!((p - q).norm() < 1e-15);
        assert_eq!(char_function_p(&[7], 1.0, z).unwrap(), one_prime_char_factor(7, 1.0, z).unwrap());
        let tab = ProductCharFunction::for_primes(&[2, 3, 5], 1.0, 10.0).unwrap();
        assert!((tab.eval(z).unwrap() - p).norm() < 1e-12);
    }

    #[test]
    fn six_primes_tiny_at_radius_1000() {
        let primes = [2, 3, 5, 7, 11, 13];
        let v = char_function_p(&primes, 1.0, Complex64::from_polar(1000.0, 0.3)).unwrap();
        assert!(v.norm() < 1e-6);
    }

    #[test]
    fn symmetric_fill_matches_full_fill() {
        let spec = GridSpec::centered(4.0, 64).unwrap();
        let f = |z: Complex64| char_function_p(&[2, 3, 5], 1.0, z);
        let a = CharFunctionGrid::fill(spec, f).unwrap();
        let b = CharFunctionGrid::fill_symmetric(spec, f).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-12);
        }
        let n = spec.resolution;
        assert!((a.value(n / 2, n / 2) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(a.values().iter().all(|v| v.norm() <= 1.0 + 1e-12));
    }

    #[test]
    fn csv_round_trip() {
        let spec = GridSpec::centered(2.0, 64).unwrap();
        let g = CharFunctionGrid::fill(spec, |z| Ok((-z.norm_sqr() / 4.0).exp() * Complex64::new(1.0, 0.5))).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        g.write_csv(&mut a).unwrap();
        g.write_sidecar(&mut b).unwrap();
        assert_eq!(CharFunctionGrid::read(&a[..], &b[..]).unwrap(), g);
    }

    #[test]
    fn dual_spacing() {
        let w = GridSpec::centered(2.0, 128).unwrap();
        let z = dual_spec(&w);
        assert!((w.cell_width() * z.cell_width() - 2.0 * PI / 128.0).abs() < 1e-15);
    }
}
