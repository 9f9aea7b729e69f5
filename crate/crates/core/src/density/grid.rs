use crate::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{Read, Write};

/// Uniform square grid of `resolution²` cells.
///
/// Node `i` along an axis sits at `center + (i − n/2)·d` with
/// `d = 2·half_width/n`, and cell `i` is `[node − d/2, node + d/2)`. Placing
/// a node exactly at the center keeps sums of node positions on the grid,
/// which the convolution relies on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: Complex64,
    pub half_width: f64,
    pub resolution: usize,
}

impl GridSpec {
    pub fn new(center: Complex64, half_width: f64, resolution: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Domain(format!("half width {half_width} must be positive")));
        }
        if resolution < 64 || !resolution.is_power_of_two() {
            return Err(Error::Domain(format!(
                "resolution {resolution} must be a power of two ≥ 64"
            )));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::Domain("grid center must be finite".into()));
        }
        Ok(Self { center, half_width, resolution })
    }

    pub fn centered(half_width: f64, resolution: usize) -> Result<Self> {
        Self::new(Complex64::new(0.0, 0.0), half_width, resolution)
    }

    pub fn cell_width(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_width().powi(2)
    }

    pub fn node_u(&self, i: usize) -> f64 {
        self.center.re + (i as f64 - (self.resolution / 2) as f64) * self.cell_width()
    }

    pub fn node_v(&self, j: usize) -> f64 {
        self.center.im + (j as f64 - (self.resolution / 2) as f64) * self.cell_width()
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.node_u(i), self.node_v(j))
    }

    /// Cell containing `w`, if any.
    pub fn locate(&self, w: Complex64) -> Option<(usize, usize)> {
        let d = self.cell_width();
        let lo = self.bounds();
        let i = ((w.re - lo.u_min) / d).floor();
        let j = ((w.im - lo.v_min) / d).floor();
        let n = self.resolution as f64;
        if i >= 0.0 && i < n && j >= 0.0 && j < n {
            Some((i as usize, j as usize))
        } else {
            None
        }
    }

    /// The region covered by all cells.
    pub fn bounds(&self) -> RectangleRegion {
        let d = self.cell_width();
        RectangleRegion {
            u_min: self.center.re - self.half_width - 0.5 * d,
            u_max: self.center.re + self.half_width - 0.5 * d,
            v_min: self.center.im - self.half_width - 0.5 * d,
            v_max: self.center.im + self.half_width - 0.5 * d,
        }
    }

    /// Whether the closed disk `|w − c| ≤ r` lies inside the grid.
    pub fn contains_disk(&self, c: Complex64, r: f64) -> bool {
        let b = self.bounds();
        c.re - r >= b.u_min && c.re + r < b.u_max && c.im - r >= b.v_min && c.im + r < b.v_max
    }

    pub fn same_geometry(&self, other: &GridSpec) -> bool {
        self == other
    }
}

/// Axis-parallel rectangle `[u_min, u_max) × [v_min, v_max)`; infinite
/// bounds are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectangleRegion {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl RectangleRegion {
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Result<Self> {
        if !(u_min < u_max && v_min < v_max) {
            return Err(Error::Domain(format!(
                "empty rectangle [{u_min}, {u_max}) × [{v_min}, {v_max})"
            )));
        }
        Ok(Self { u_min, u_max, v_min, v_max })
    }

    pub fn contains(&self, w: Complex64) -> bool {
        w.re >= self.u_min && w.re < self.u_max && w.im >= self.v_min && w.im < self.v_max
    }

    /// `count` random sub-rectangles of `bbox`, deterministic in `seed`.
    pub fn random_panel(seed: u64, count: usize, bbox: &RectangleRegion) -> Vec<RectangleRegion> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |lo: f64, hi: f64| {
            loop {
                let a = lo + (hi - lo) * rng.gen::<f64>();
                let b = lo + (hi - lo) * rng.gen::<f64>();
                if a != b {
                    return (a.min(b), a.max(b));
                }
            }
        };
        (0..count)
            .map(|_| {
                let (u_min, u_max) = draw(bbox.u_min, bbox.u_max);
                let (v_min, v_max) = draw(bbox.v_min, bbox.v_max);
                RectangleRegion { u_min, u_max, v_min, v_max }
            })
            .collect()
    }
}

/// Where a density came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: String,
    pub seed: Option<u64>,
    pub parameters: BTreeMap<String, f64>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl Provenance {
    pub fn new(method: impl Into<String>) -> Self {
        Self { method: method.into(), ..Default::default() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }
}

/// Nonnegative density values on a [`GridSpec`], with respect to
/// `|dw| = (2π)^{-1} du dv`. Values are stored row by row (`v` outer).
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    spec: GridSpec,
    values: Vec<f64>,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    center: [f64; 2],
    half_width: f64,
    resolution: usize,
    mass: f64,
    provenance: Provenance,
}

impl GridDensity {
    pub fn from_values(spec: GridSpec, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        let n = spec.resolution;
        if values.len() != n * n {
            return Err(Error::GeometryMismatch(format!(
                "{} values for a {n}×{n} grid",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!("density value {bad} is not a finite nonnegative number")));
        }
        Ok(Self { spec, values, provenance })
    }

    /// Density of unit mass concentrated in the cell containing `w`.
    pub fn point_mass(spec: GridSpec, w: Complex64) -> Result<Self> {
        let (i, j) = spec.locate(w).ok_or_else(|| Error::Coverage {
            reason: format!("point {w} outside grid"),
            lost_mass: 1.0,
        })?;
        let mut values = vec![0.0; spec.resolution * spec.resolution];
        values[j * spec.resolution + i] = 2.0 * PI / spec.cell_area();
        Self::from_values(spec, values, Provenance::new("point-mass"))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.resolution + i]
    }

    /// `Σ values · cell_area / 2π`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_area() / (2.0 * PI)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `∫_R D |dw|` with fractional coverage of boundary cells.
    pub fn integrate_rectangle(&self, r: &RectangleRegion) -> f64 {
        let n = self.spec.resolution;
        let d = self.spec.cell_width();
        let b = self.spec.bounds();
        let overlap = |lo: f64, r_lo: f64, r_hi: f64| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let c_lo = lo + i as f64 * d;
                    let c_hi = c_lo + d;
                    ((c_hi.min(r_hi) - c_lo.max(r_lo)) / d).clamp(0.0, 1.0)
                })
                .collect()
        };
        let fu = overlap(b.u_min, r.u_min, r.u_max);
        let fv = overlap(b.v_min, r.v_min, r.v_max);
        let mut total = 0.0;
        for (j, &wv) in fv.iter().enumerate() {
            if wv == 0.0 {
                continue;
            }
            let row = &self.values[j * n..(j + 1) * n];
            let s: f64 = row.iter().zip(&fu).map(|(v, w)| v * w).sum();
            total += wv * s;
        }
        total * self.spec.cell_area() / (2.0 * PI)
    }

    /// `max |D(u, v) − D(u, −v)|` over cells whose mirror image is on the grid.
    pub fn max_conjugation_asymmetry(&self) -> Result<f64> {
        if self.spec.center.im != 0.0 {
            return Err(Error::GeometryMismatch("grid not symmetric about the real axis".into()));
        }
        let n = self.spec.resolution;
        let mut worst: f64 = 0.0;
        for j in 1..n {
            let m = n - j;
            for i in 0..n {
                worst = worst.max((self.value(i, j) - self.value(i, m)).abs());
            }
        }
        Ok(worst)
    }

    /// `max |A − B|` cellwise.
    pub fn sup_distance(&self, other: &GridDensity) -> Result<f64> {
        if !self.spec.same_geometry(&other.spec) {
            return Err(Error::GeometryMismatch("densities on different grids".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Mean and per-axis standard deviations of the normalised density.
    pub fn moments(&self) -> (Complex64, f64, f64) {
        let n = self.spec.resolution;
        let (mut m0, mut mu, mut mv, mut su, mut sv) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for j in 0..n {
            let v = self.spec.node_v(j);
            for i in 0..n {
                let u = self.spec.node_u(i);
                let x = self.value(i, j);
                m0 += x;
                mu += x * u;
                mv += x * v;
                su += x * u * u;
                sv += x * v * v;
            }
        }
        let (mu, mv) = (mu / m0, mv / m0);
        let sd_u = (su / m0 - mu * mu).max(0.0).sqrt();
        let sd_v = (sv / m0 - mv * mv).max(0.0).sqrt();
        (Complex64::new(mu, mv), sd_u, sd_v)
    }

    /// Box of `k` standard deviations around the mean.
    pub fn moment_box(&self, k: f64) -> RectangleRegion {
        let (m, su, sv) = self.moments();
        RectangleRegion { u_min: m.re - k * su, u_max: m.re + k * su, v_min: m.im - k * sv, v_max: m.im + k * sv }
    }

    /// CSV with header `u,v,density`, one row per cell, `v` outer.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "v", "density"])?;
        let n = self.spec.resolution;
        for j in 0..n {
            let v = self.spec.node_v(j).to_string();
            for i in 0..n {
                w.write_record([self.spec.node_u(i).to_string(), v.clone(), self.value(i, j).to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// JSON sidecar with the geometry, mass and provenance.
    pub fn write_sidecar<W: Write>(&self, out: W) -> Result<()> {
        let car = Sidecar {
            center: [self.spec.center.re, self.spec.center.im],
            half_width: self.spec.half_width,
            resolution: self.spec.resolution,
            mass: self.mass(),
            provenance: self.provenance.clone(),
        };
        serde_json::to_writer_pretty(out, &car)?;
        Ok(())
    }

    /// Reads the pair written by [`write_csv`](Self::write_csv) and
    /// [`write_sidecar`](Self::write_sidecar).
    pub fn read<R1: Read, R2: Read>(csv_in: R1, sidecar_in: R2) -> Result<Self> {
        let car: Sidecar = serde_json::from_reader(sidecar_in)?;
        let spec = GridSpec::new(Complex64::new(car.center[0], car.center[1]), car.half_width, car.resolution)?;
        let mut rdr = csv::Reader::from_reader(csv_in);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["u", "v", "density"] {
            return Err(Error::Parse { line: 1, message: "expected header u,v,density".into() });
        }
        let mut values = Vec::with_capacity(spec.resolution * spec.resolution);
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let x: f64 = rec.get(2).unwrap_or("").parse().map_err(|e| Error::Parse {
                line: k + 2,
                message: format!("density: {e}"),
            })?;
            values.push(x);
        }
        Self::from_values(spec, values, car.provenance)
    }

    /// Adds `weight` at `w` by bilinear (cloud-in-cell) deposition onto the
    /// four surrounding nodes. Returns the weight that fell off the grid.
    pub(crate) fn deposit_cic(spec: &GridSpec, counts: &mut [f64], w: Complex64, weight: f64) -> f64 {
        let n = spec.resolution as isize;
        let d = spec.cell_width();
        let x = (w.re - spec.node_u(0)) / d;
        let y = (w.im - spec.node_v(0)) / d;
        let (i0, j0) = (x.floor(), y.floor());
        let (fx, fy) = (x - i0, y - j0);
        let (i0, j0) = (i0 as isize, j0 as isize);
        let mut lost = 0.0;
        for (di, wx) in [(0, 1.0 - fx), (1, fx)] {
            for (dj, wy) in [(0, 1.0 - fy), (1, fy)] {
                let part = weight * wx * wy;
                let (i, j) = (i0 + di, j0 + dj);
                if i >= 0 && i < n && j >= 0 && j < n {
                    counts[(j * n + i) as usize] += part;
                } else {
                    lost += part;
                }
            }
        }
        lost
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(spec: GridSpec) -> GridDensity {
        let n = spec.resolution;
        let b = spec.bounds();
        let area = (b.u_max - b.u_min) * (b.v_max - b.v_min);
        GridDensity::from_values(spec, vec![2.0 * PI / area; n * n], Provenance::new("uniform")).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::centered(1.0, 100).is_err());
        assert!(GridSpec::centered(1.0, 32).is_err());
        assert!(GridSpec::centered(0.0, 64).is_err());
        let s = GridSpec::centered(1.0, 64).unwrap();
        assert_eq!(s.node_u(32), 0.0);
        assert_eq!(s.locate(Complex64::new(0.0, 0.0)), Some((32, 32)));
        assert_eq!(s.locate(Complex64::new(5.0, 0.0)), None);
    }

    #[test]
    fn rectangle_integrals() {
        let spec = GridSpec::centered(1.0, 64).unwrap();
        let d = uniform(spec);
        assert!((d.mass() - 1.0).abs() < 1e-12);
        let all = RectangleRegion::new(-10.0, 10.0, -10.0, 10.0).unwrap();
        assert!((d.integrate_rectangle(&all) - 1.0).abs() < 1e-12);
        let inf = RectangleRegion::new(f64::NEG_INFINITY, f64::INFINITY, 0.0, f64::INFINITY).unwrap();
        let b = spec.bounds();
        let expect = (b.v_max - 0.0) / (b.v_max - b.v_min);
        assert!((d.integrate_rectangle(&inf) - expect).abs() < 1e-12);
        let far = RectangleRegion::new(5.0, 6.0, 5.0, 6.0).unwrap();
        assert_eq!(d.integrate_rectangle(&far), 0.0);
        // a quarter of a cell
        let w = spec.cell_width();
        let tiny = RectangleRegion::new(-0.5 * w, 0.0, -0.5 * w, 0.0).unwrap();
        assert!((d.integrate_rectangle(&tiny) - 0.25 / (64.0 * 64.0)).abs() < 1e-15);
        assert!(RectangleRegion::new(1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let spec = GridSpec::new(Complex64::new(0.25, -0.5), 1.5, 64).unwrap();
        let mut d = uniform(spec);
        d.provenance = Provenance::new("test").with("sigma", 1.5);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        d.write_csv(&mut a).unwrap();
        d.write_sidecar(&mut b).unwrap();
        let back = GridDensity::read(&a[..], &b[..]).unwrap();
        assert_eq!(back, d);
        assert!(String::from_utf8(a).unwrap().starts_with("u,v,density\n"));
    }

    #[test]
    fn negative_values_rejected() {
        let spec = GridSpec::centered(1.0, 64).unwrap();
        let mut v = vec![0.0; 64 * 64];
        v[3] = -1e-3;
        assert!(GridDensity::from_values(spec, v, Provenance::default()).is_err());
    }

    #[test]
    fn cic_conserves_weight() {
        let spec = GridSpec::centered(1.0, 64).unwrap();
        let mut c = vec![0.0; 64 * 64];
        let lost = GridDensity::deposit_cic(&spec, &mut c, Complex64::new(0.123, -0.456), 1.0);
        assert_eq!(lost, 0.0);
        assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let lost = GridDensity::deposit_cic(&spec, &mut c, Complex64::new(3.0, 0.0), 1.0);
        assert_eq!(lost, 1.0);
    }

    #[test]
    fn panel_is_deterministic_and_inside() {
        let bbox = RectangleRegion::new(-1.0, 1.0, -2.0, 2.0).unwrap();
        let a = RectangleRegion::random_panel(7, 100, &bbox);
        assert_eq!(a, RectangleRegion::random_panel(7, 100, &bbox));
        assert!(a.iter().all(|r| r.u_min >= -1.0 && r.u_max <= 1.0 && r.u_min < r.u_max && r.v_min < r.v_max));
    }
}
