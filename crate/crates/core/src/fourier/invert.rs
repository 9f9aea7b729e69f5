use super::charfn::{dual_spec, CharFunctionGrid};
use super::fft::fft2;
use crate::density::{GridDensity, GridSpec, Provenance};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct InversionOptions {
    /// Maximum `|M̃|` allowed on the boundary band of the `z`-grid.
    pub tail_tolerance: f64,
    /// Maximum negative mass clipped from the output.
    pub negative_mass_threshold: f64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self { tail_tolerance: 1e-6, negative_mass_threshold: 1e-3 }
    }
}

/// Inverts `M(w) = ∫ M̃(z) exp(−i⟨z, w⟩) |dz|` onto `w_spec`, whose dual
/// grid must be the grid of `c`. Negative values are clipped to zero and the
/// clipped mass is recorded under `negative_mass`.
pub fn invert_char_function(c: &CharFunctionGrid, w_spec: GridSpec, opts: &InversionOptions) -> Result<GridDensity> {
    let z_spec = *c.spec();
    let expect = dual_spec(&w_spec);
    if z_spec.resolution != expect.resolution || (z_spec.half_width - expect.half_width).abs() > 1e-12 * expect.half_width {
        return Err(Error::GeometryMismatch(format!(
            "z-grid half width {} / resolution {} is not dual to the w-grid (needs {} / {})",
            z_spec.half_width, z_spec.resolution, expect.half_width, expect.resolution
        )));
    }
    if c.decay.boundary_max > opts.tail_tolerance {
        return Err(Error::Coverage {
            reason: format!(
                "characteristic function has not decayed at the z-grid edge (max {:.3e} > {:.1e})",
                c.decay.boundary_max, opts.tail_tolerance
            ),
            lost_mass: c.decay.boundary_max,
        });
    }
    let n = z_spec.resolution;
    let (cu, cv) = (w_spec.center.re, w_spec.center.im);
    let sign = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut data: Vec<Complex64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            let z = z_spec.node(i, j);
            let shift = Complex64::from_polar(1.0, -(z.re * cu + z.im * cv));
            c.values()[k] * shift * sign(i + j)
        })
        .collect();
    fft2(&mut data, n, false);
    let scale = z_spec.cell_area() / (2.0 * PI);
    let mut negative = 0.0;
    let values: Vec<f64> = data
        .iter()
        .enumerate()
        .map(|(k, y)| {
            let v = scale * sign(k % n + k / n) * y.re;
            if v < 0.0 {
                negative -= v;
                0.0
            } else {
                v
            }
        })
        .collect();
    let negative_mass = negative * w_spec.cell_area() / (2.0 * PI);
    if negative_mass > opts.negative_mass_threshold {
        return Err(Error::InversionQuality { negative_mass, threshold: opts.negative_mass_threshold });
    }
    let mut prov = Provenance::new("fourier-inversion");
    prov.diagnostics.insert("negative_mass".into(), negative_mass);
    prov.diagnostics.insert("z_boundary_max".into(), c.decay.boundary_max);
    GridDensity::from_values(w_spec, values, prov)
}
