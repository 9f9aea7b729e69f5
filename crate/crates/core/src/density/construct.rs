use super::convolve::convolve;
use super::curve::prime_curve_measure;
use super::grid::{GridDensity, GridSpec, Provenance};
use super::torus::support_radius;
use crate::euler::PrimeCurve;
use crate::fourier::{dual_spec, invert_char_function, CharFunctionGrid, InversionOptions, ProductCharFunction};
use crate::parallel;
use crate::quadrature::ClosedCurve;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityMethod {
    FourierInversion,
    CurveConvolution,
}

#[derive(Debug, Clone, Copy)]
pub struct ConstructionOptions {
    /// θ-samples per curve when two curves are rasterised jointly.
    pub pair_samples: usize,
    /// θ-samples for a curve rasterised on its own.
    pub single_samples: usize,
    /// Target size of the damped transform at 15/16 of the `z`-grid half
    /// width.
    pub mollifier_floor: f64,
    pub inversion: InversionOptions,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        Self { pair_samples: 2048, single_samples: 1 << 16, mollifier_floor: 1e-8, inversion: InversionOptions::default() }
    }
}

/// Centered grid of half width `1.2 ×` the support radius.
pub fn default_grid(primes: &[u64], sigma: f64, resolution: usize) -> Result<GridSpec> {
    GridSpec::centered(1.2 * support_radius(primes, sigma), resolution)
}

/// The finite-`P` density `M_{σ,P}` on `spec`.
///
/// `FourierInversion` samples `∏_p M̃_{σ,{p}}` on the dual grid, damps it by
/// a Gaussian where needed and inverts by FFT; it needs `|P| ≥ 3` for the product
/// to be integrable. `CurveConvolution` rasterises the curves two at a time
/// by a double θ-grid and convolves the results.
pub fn m_sigma_p(
    primes: &[u64],
    sigma: f64,
    spec: GridSpec,
    method: DensityMethod,
    opts: &ConstructionOptions,
) -> Result<GridDensity> {
    if primes.is_empty() {
        return Err(Error::EmptyDomain("empty prime set".into()));
    }
    if sigma <= 0.5 {
        return Err(Error::Domain(format!("σ = {sigma} must exceed 1/2")));
    }
    let radius = support_radius(primes, sigma);
    if !spec.contains_disk(Complex64::new(0.0, 0.0), radius) {
        return Err(Error::Coverage {
            reason: format!("grid does not contain the support disk of radius {radius:.6}"),
            lost_mass: 0.0,
        });
    }
    let mut d = match method {
        DensityMethod::FourierInversion => by_inversion(primes, sigma, spec, opts)?,
        DensityMethod::CurveConvolution => by_convolution(primes, sigma, spec, opts)?,
    };
    d.provenance.parameters.insert("sigma".into(), sigma);
    d.provenance.parameters.insert("primes".into(), primes.len() as f64);
    d.provenance.parameters.insert("largest_prime".into(), *primes.iter().max().unwrap() as f64);
    Ok(d)
}

fn by_inversion(primes: &[u64], sigma: f64, spec: GridSpec, opts: &ConstructionOptions) -> Result<GridDensity> {
    if primes.len() < 3 {
        return Err(Error::Method(format!(
            "fourier-inversion needs |P| ≥ 3 for an integrable transform (got {}); use curve-convolution",
            primes.len()
        )));
    }
    let curves = primes.iter().map(|&p| PrimeCurve::new(p, sigma)).collect::<Result<Vec<_>>>()?;
    invert_curve_product(curves, spec, opts)
}

/// Largest `|Π factors|` over 32 directions on the circle `|z| = edge`.
pub(crate) fn edge_decay<C: ClosedCurve>(product: &ProductCharFunction<C>, edge: f64) -> Result<f64> {
    const DIRECTIONS: usize = 32;
    let values = parallel::try_map_indexed(DIRECTIONS, |k| {
        let angle = PI * (2 * k + 1) as f64 / DIRECTIONS as f64;
        product.eval(Complex64::from_polar(edge, angle)).map(|v| v.norm())
    })?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// Density of `Σ_j w_j(θ_j)` under Haar measure, by sampling the product of
/// the curves' oscillatory means on the dual grid and inverting.
///
/// The product is damped by a Gaussian just strong enough to bring it to
/// `mollifier_floor` at 15/16 of the grid half width; no damping is applied
/// if it is already that small there.
pub(crate) fn invert_curve_product<C: ClosedCurve>(curves: Vec<C>, spec: GridSpec, opts: &ConstructionOptions) -> Result<GridDensity> {
    let z_spec = dual_spec(&spec);
    let edge = 15.0 / 16.0 * z_spec.half_width;
    let product = ProductCharFunction::new(curves, z_spec.half_width * 2f64.sqrt());
    let decay = edge_decay(&product, edge)?;
    let floor = (opts.mollifier_floor / decay).min(1.0);
    let eta = if floor < 1.0 { (-2.0 * floor.ln()).sqrt() / edge } else { 0.0 };
    let grid = CharFunctionGrid::fill_symmetric(z_spec, |z| {
        let damp = (-0.5 * eta * eta * z.norm_sqr()).exp();
        if damp < 1e-40 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(product.eval(z)? * damp)
    })?;
    let mut d = invert_char_function(&grid, spec, &opts.inversion)?;
    d.provenance.method = "fourier-inversion".into();
    d.provenance.diagnostics.insert("mollifier_width".into(), eta);
    d.provenance.diagnostics.insert("edge_decay".into(), decay);
    Ok(d)
}

fn by_convolution(primes: &[u64], sigma: f64, spec: GridSpec, opts: &ConstructionOptions) -> Result<GridDensity> {
    let groups: Vec<&[u64]> = primes.chunks(2).collect();
    let parts = parallel::try_map_indexed(groups.len(), |g| match groups[g] {
        [p, q] => rasterize_pair(*p, *q, sigma, spec, opts.pair_samples),
        [p] => prime_curve_measure(*p, sigma, opts.single_samples)?.rasterize(spec),
        _ => unreachable!(),
    })?;
    let mut lost = 0.0;
    let mut acc = parts[0].clone();
    for part in &parts[1..] {
        acc = convolve(&acc, part)?;
        lost += acc.provenance.diagnostics.get("lost_mass").copied().unwrap_or(0.0);
    }
    let mut prov = Provenance::new("curve-convolution");
    prov.diagnostics.insert("lost_mass".into(), lost);
    prov.parameters.insert("pair_samples".into(), opts.pair_samples as f64);
    acc.provenance = prov;
    Ok(acc)
}

/// Joint cloud-in-cell raster of `w_p(θ₁) + w_q(θ₂)` over an `n × n` θ-grid.
fn rasterize_pair(p: u64, q: u64, sigma: f64, spec: GridSpec, n: usize) -> Result<GridDensity> {
    let cp = PrimeCurve::new(p, sigma)?;
    let cq = PrimeCurve::new(q, sigma)?;
    let a: Vec<Complex64> = (0..n).map(|j| cp.grid_point(j, n)).collect();
    let b: Vec<Complex64> = (0..n).map(|j| cq.grid_point(j, n)).collect();
    let mut acc = vec![0.0; spec.resolution * spec.resolution];
    let weight = 1.0 / (n * n) as f64;
    let mut lost = 0.0;
    for &x in &a {
        for &y in &b {
            lost += GridDensity::deposit_cic(&spec, &mut acc, x + y, weight);
        }
    }
    if lost > 1e-6 {
        return Err(Error::Coverage { reason: format!("curves of {p} and {q} leave the grid"), lost_mass: lost });
    }
    let scale = 2.0 * PI / spec.cell_area();
    acc.iter_mut().for_each(|v| *v *= scale);
    GridDensity::from_values(spec, acc, Provenance::new("curve-pair-raster"))
}
