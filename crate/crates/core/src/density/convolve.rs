use super::grid::{GridDensity, Provenance};
use crate::fourier::fft2;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Mass allowed to fall outside the output grid.
const MAX_LOST_MASS: f64 = 1e-6;

/// `(A ∗ B)(w) = ∫ A(w′) B(w − w′) |dw′|` on the common grid of `a` and `b`,
/// which must be centered at 0. Computed as a zero-padded linear
/// convolution, so nothing wraps around; mass that lands outside the grid
/// beyond `1e-6` is a coverage error.
pub fn convolve(a: &GridDensity, b: &GridDensity) -> Result<GridDensity> {
    let spec = *a.spec();
    if !spec.same_geometry(b.spec()) {
        return Err(Error::GeometryMismatch("convolution inputs on different grids".into()));
    }
    if spec.center != Complex64::new(0.0, 0.0) {
        return Err(Error::GeometryMismatch("convolution grids must be centered at 0".into()));
    }
    let n = spec.resolution;
    let m = 2 * n;
    let pad = |d: &GridDensity| {
        let mut out = vec![Complex64::new(0.0, 0.0); m * m];
        for j in 0..n {
            for i in 0..n {
                out[j * m + i] = d.value(i, j).into();
            }
        }
        fft2(&mut out, m, false);
        out
    };
    let mut fa = pad(a);
    let fb = pad(b);
    fa.iter_mut().zip(&fb).for_each(|(x, y)| *x *= y);
    fft2(&mut fa, m, true);

    // full result index k maps to output index k − n/2
    let weight = spec.cell_area() / (2.0 * PI) / (m * m) as f64;
    let half = n / 2;
    let mut values = vec![0.0; n * n];
    let mut total = 0.0;
    for k2 in 0..m {
        for k1 in 0..m {
            let v = (fa[k2 * m + k1].re * weight).max(0.0);
            total += v;
            let (i, j) = (k1.wrapping_sub(half), k2.wrapping_sub(half));
            if i < n && j < n {
                values[j * n + i] = v;
            }
        }
    }
    let kept: f64 = values.iter().sum();
    let lost_mass = (total - kept) * spec.cell_area() / (2.0 * PI);
    if lost_mass > MAX_LOST_MASS {
        return Err(Error::Coverage { reason: "convolution support exceeds the grid".into(), lost_mass });
    }
    let mut prov = Provenance::new("convolution");
    prov.diagnostics.insert("lost_mass".into(), lost_mass.max(0.0));
    GridDensity::from_values(spec, values, prov)
}
