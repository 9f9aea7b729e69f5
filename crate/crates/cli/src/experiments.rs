use crate::config::{bail, ConfigError, Experiment, ExperimentConfig, InvertSource};
use crate::report::{num, Outcome, OutDir};
use mfunc_core::automorphic::{
    automorphic_density, automorphic_support_radius, automorphic_torus_histogram, jw_constant_profile,
    pf_epsilon_census, sym_diff_identity_check, AutomorphicSamples,
};
use mfunc_core::averages::{modulus_average, modulus_warning, torus_integral, vertical_samples, empirical_w, TestFunction, TorusOptions};
use mfunc_core::averages::chi_tau_average;
use mfunc_core::density::{m_sigma_p, support_radius, ConstructionOptions, DensityMethod, GridDensity, GridSpec, RectangleRegion};
use mfunc_core::euler::{parse_eigenvalue_file, BranchMode, PrimeCurve, PrimitiveFormData, ZetaConfig};
use mfunc_core::fourier::{
    char_function_p, dual_spec, invert_char_function, jw_decay_report, lambda_coefficients, log_spaced, mtilde_dirichlet,
    CharFunctionGrid, InversionOptions,
};
use mfunc_core::{Complex64, Error};
use std::f64::consts::PI;
use std::fs::File;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Core(Error),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

type R<T> = std::result::Result<T, RunError>;

pub fn run(experiment: Experiment, cfg: &mut ExperimentConfig, out: &mut OutDir) -> R<Outcome> {
    if experiment.stochastic() {
        cfg.seed(experiment)?;
    }
    match experiment {
        Experiment::Density => density(cfg, out),
        Experiment::Invert => invert(cfg, out),
        Experiment::BohrJessen => bohr_jessen(cfg, out),
        Experiment::ChiTau => chi_tau(cfg, out),
        Experiment::CharAvg => char_avg(cfg, out),
        Experiment::JwReport => jw_report(cfg, out),
        Experiment::AutomorphicDensity => automorphic(cfg, out),
        Experiment::SympowIdentity => sympow(cfg, out),
        Experiment::PfCensus => census(cfg, out),
        Experiment::LambdaCoeffs => lambda(cfg, out),
    }
}

fn w_grid(cfg: &mut ExperimentConfig, radius: f64, resolution: usize) -> R<GridSpec> {
    let w = ExperimentConfig::positive(&mut cfg.half_width, 1.2 * radius, "half_width")?;
    Ok(GridSpec::centered(w, resolution)?)
}

fn construction_options(cfg: &mut ExperimentConfig) -> R<ConstructionOptions> {
    Ok(ConstructionOptions {
        mollifier_floor: cfg.tolerance("mollifier_floor", 1e-8)?,
        inversion: inversion_options(cfg)?,
        ..Default::default()
    })
}

fn inversion_options(cfg: &mut ExperimentConfig) -> R<InversionOptions> {
    Ok(InversionOptions {
        tail_tolerance: cfg.tolerance("tail", 1e-6)?,
        negative_mass_threshold: cfg.tolerance("negative_mass", 1e-3)?,
    })
}

fn write_density(out: &mut OutDir, stem: &str, d: &GridDensity) -> R<()> {
    d.write_csv(out.writer(&format!("{stem}.csv"))?)?;
    d.write_sidecar(out.writer(&format!("{stem}.json"))?)?;
    Ok(())
}

fn describe_density(o: &mut Outcome, d: &GridDensity) {
    let (mean, su, sv) = d.moments();
    o.output("mass", d.mass());
    o.output("mean", [mean.re, mean.im]);
    o.output("sd", [su, sv]);
    o.output("max_value", d.max_value());
    o.output("provenance", &d.provenance);
}

fn rectangle_rows(panel: &[RectangleRegion], a: &[f64], b: &[f64]) -> Vec<Vec<String>> {
    panel
        .iter()
        .zip(a.iter().zip(b))
        .map(|(r, (x, y))| {
            vec![num(r.u_min), num(r.u_max), num(r.v_min), num(r.v_max), num(*x), num(*y), num((x - y).abs())]
        })
        .collect()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn load_form(cfg: &mut ExperimentConfig, limit: u64) -> R<PrimitiveFormData> {
    match &cfg.form_file {
        None => Ok(PrimitiveFormData::ramanujan_delta(limit.max(2))?),
        Some(path) => {
            let (Some(weight), Some(level)) = (cfg.weight, cfg.level) else {
                bail!("form_file needs weight and level");
            };
            let text = std::fs::read_to_string(path).map_err(Error::from)?;
            Ok(PrimitiveFormData::from_eigenvalues(weight, level, parse_eigenvalue_file(&text)?)?)
        }
    }
}

fn density(cfg: &mut ExperimentConfig, out: &mut OutDir) -> R<Outcome> {
    let sigma = cfg.sigma_or(1.0)?;
    let primes = cfg.primes_or_first(5)?;
    let n = cfg.resolution_or(256)?;
    let method = *cfg.method.get_or_insert(DensityMethod::FourierInversion);
    let spec = w_grid(cfg, support_radius(&primes, sigma), n)?;
    let opts = construction_options(cfg)?;
    let (mass_tol, sym_tol) = (cfg.tolerance("mass", 1e-3)?, cfg.tolerance("symmetry", 1e-3)?);
    let d = m_sigma_p(&primes, sigma, spec, method, &opts)?;
    write_density(out, "density", &d)?;
    let mut o = Outcome::default();
    describe_density(&mut o, &d);
    o.gap("mass", (d.mass() - 1.0).abs(), mass_tol);
    o.gap("conjugation_asymmetry", d.max_conjugation_asymmetry()?, sym_tol);
    Ok(o)
}

fn invert(cfg: &mut ExperimentConfig, out: &mut OutDir) -> R<Outcome> {
    let source = *cfg.source.get_or_insert(InvertSource::Primes);
    let opts = inversion_options(cfg)?;
    let mass_tol = cfg.tolerance("mass", 1e-3)?;
    let mut o = Outcome::default();
    let (grid, w_spec) = match source {
        InvertSource::Primes => {
            let sigma = cfg.sigma_or(1.0)?;
            let primes = cfg.primes_or_first(8)?;
            let n = cfg.resolution_or(256)?;
            let w_spec = w_grid(cfg, support_radius(&primes, sigma), n)?;
            let z_spec = dual_spec(&w_spec);
            let product = mfunc_core::fourier::ProductCharFunction::for_primes(&primes, sigma, z_spec.half_width * 2f64.sqrt())?;
            (CharFunctionGrid::fill_symmetric(z_spec, |z| product.eval(z))?, w_spec)
        }
        InvertSource::Gaussian => {
            let n = cfg.resolution_or(512)?;
            let w_spec = w_grid(cfg, 20.0 / 3.0, n)?;
            let grid = CharFunctionGrid::fill_symmetric(dual_spec(&w_spec), |z| {
                Ok(Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0))
            })?;
            (grid, w_spec)
        }
        InvertSource::File => {
            let Some(path) = cfg.char_function.clone() else {
                bail!("source = file needs char_function");
            };
            let grid = CharFunctionGrid::read(File::open(&path).map_err(Error::from)?, File::open(path.with_extension("json")).map_err(Error::from)?)?;
            let z = *grid.spec();
            cfg.resolution = Some(z.resolution);
            let w = z.resolution as f64 * PI / (2.0 * z.half_width);
            (grid, w_grid(cfg, w / 1.2, z.resolution)?)
        }
    };
    if source != InvertSource::File {
        grid.write_csv(out.writer("char_function.csv")?)?;
        grid.write_sidecar(out.writer("char_function.json")?)?;
    }
    let d = invert_char_function(&grid, w_spec, &opts)?;
    write_density(out, "density", &d)?;
    describe_density(&mut o, &d);
    o.output("z_decay", &grid.decay);
    o.gap("mass", (d.mass() - 1.0).abs(), mass_tol);
    if source == InvertSource::Gaussian {
        let tol = cfg.tolerance("cell_error", 1e-6)?;
        let n = w_spec.resolution;
        let err = (0..n * n)
            .map(|k| (d.value(k % n, k / n) - (-0.5 * w_spec.node(k % n, k / n).norm_sqr()).exp()).abs())
            .fold(0.0, f64::max);
        o.gap("gaussian_cell_error", err, tol);
    }
    Ok(o)
}

fn bohr_jessen(cfg: &mut ExperimentConfig, out: &mut OutDir) -> R<Outcome> {
    let seed = cfg.seed(Experiment::BohrJessen)?;
    let sigma = cfg.sigma_or(1.5)?;
    let t_max = ExperimentConfig::positive(&mut cfg.t_max, 1e4, "t_max")?;
    let step = ExperimentConfig::positive(&mut cfg.step, 0.01, "step")?;
    let primes = cfg.primes_or_limit(100)?;
    let n = cfg.resolution_or(256)?;
    let count = ExperimentConfig::count(&mut cfg.rectangles, 100, "rectangles")?;
    let tol = cfg.tolerance("gap", if sigma >= 1.5 { 0.02 } else { 0.03 })?;
    let spec = w_grid(cfg, support_radius(&primes, sigma), n)?;
    let opts = construction_options(cfg)?;
    let d = m_sigma_p(&primes, sigma, spec, DensityMethod::FourierInversion, &opts)?;
    let mode = if sigma > 1.0 { BranchMode::Default } else { BranchMode::Experimental };
    let dist = vertical_samples(sigma, t_max, step, mode, &ZetaConfig::default())?;
    let panel = RectangleRegion::random_panel(seed, count, &d.moment_box(3.0));
    let emp: Vec<f64> = panel.iter().map(|r| empirical_w(&dist, r)).collect();
    let den: Vec<f64> = panel.iter().map(|r| d.integrate_rectangle(r)).collect();
    out.csv(
        "rectangles.csv",
        &["u_min", "u_max", "v_min", "v_max", "empirical", "density", "gap"],
        rectangle_rows(&panel, &emp, &den),
    )?;
    write_density(out, "density", &d)?;
    let mut o = Outcome::default();
    o.output("samples", dist.len());
    o.output("excluded_samples", dist.excluded);
    o.output("density_mass", d.mass());
    if dist.excluded > 0 {
        o.warnings.push(format!("{} samples dropped by branch tracking", dist.excluded));
    }
    o.gap("gap", max_gap(&emp, &den), tol);
    Ok(o)
}

fn default_z() -> Vec<Complex64> {
    (0..10).map(|k| Complex64::from_polar(0.5 + 0.5 * k as f64, 0.7 * k as f64)).collect()
}

fn chi_tau(cfg: &mut ExperimentConfig, out: &mut OutDir) -> R<Outcome> {
    let sigma = cfg.sigma_or(1.0)?;
    let primes = cfg.primes_or_first(6)?;
    let t_max = ExperimentConfig::positive(&mut cfg.t_max, 1e5, "t_max")?;
    let step = ExperimentConfig::positive(&mut cfg.step, 0.05, "step")?;
    let zs = cfg.z_points(default_z());
    let tol = cfg.tolerance("gap", 3e-2)?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &z in &zs {
        let avg = chi_tau_average(&primes, sigma, &TestFunction::FourierKernel { z }, t_max, step)?;
        let exact = char_function_p(&primes, sigma, z)?;
        let gap = (avg - exact).norm();
        worst = worst.max(gap);
        rows.push(vec![num(z.re), num(z.im), num(avg.re), num(avg.im), num(exact.re), num(exact.im), num(gap)]);
    }
    out.csv(
        "chi_tau.csv",
        &["z_re", "z_im", "average_re", "average_im", "char_function_re", "char_function_im", "gap"],
        rows,
    )?;
    let mut o = Outcome::default();
    o.gap("gap", worst, tol);
    Ok(o)
}

fn char_avg(cfg: &mut ExperimentConfig, out: &mut OutDir) -> R<Outcome> {
    let sigma = cfg.sigma_or(1.0)?;
    let primes = cfg.primes_or_first(2)?;
    let moduli = cfg.moduli.get_or_insert_with(|| vec![101, 211, 401, 809, 1009]).clone();
    if moduli.is_empty() {
        bail!("moduli must not be empty");
    }
    let width = ExperimentConfig::positive(&mut cfg.width, 1.0, "width")?;
    let seed = *cfg.seed.get_or_insert(0);
    let tol = cfg.tolerance("gap", 0.05)?;
    let phi = TestFunction::Gaussian { center: Complex64::new(0.0, 0.0), width };
    let curves = primes.iter().map(|&p| PrimeCurve::new(p, sigma)).collect::<mfunc_core::Result<Vec<_>>>()?;
    let exact = torus_integral(&curves, &phi, &TorusOptions { seed, ..Default::default() })?;
    let mut o = Outcome::default();
    let mut rows = Vec::new();
    let mut gaps = Vec::new();
    for &q in &moduli {
        if let Some(w) = modulus_warning(q, &primes) {
            o.warnings.push(w);
        }
        let avg = modulus_average(q, &primes, sigma, &phi)?;
        let gap = (avg - exact).norm();
        gaps.push(gap);
        rows.push(vec![q.to_string(), num(avg.re), num(gap)]);
    }
    out.csv("convergence.csv", &["parameter", "estimate", "gap"], rows)?;
    o.output("torus_integral", [exact.re, exact.im]);
    o.output("gaps", &gaps);
    o.output("monotone", gaps.windows(2).all(|w| w[1] < w[0]));
    o.gap("final_gap", *gaps.last().unwrap(), tol);
    Ok(o)
}

fn jw_report(cfg: &mut ExperimentConfig, out: &mut OutDir) -> R<Outcome> {
    let sigma = cfg.sigma_or(1.0)?;
    let primes = cfg.primes_or_first(4)?;
    let r_min = ExperimentConfig::positive(&mut cfg.radius_min, 10.0, "radius_min")?;
    let r_max = ExperimentConfig::positive(&mut cfg.radius_max, 1000.0, "radius_max")?;
    if r_max <= r_min {
        bail!("radius_max must exceed radius_min");
    }
    let n_radii = ExperimentConfig::count(&mut cfg.radii, 50, "radii")?;
    let dirs = ExperimentConfig::count(&mut cfg.directions, 32, "directions")?;
    let rep = jw_decay_report(&primes, sigma, &log_spaced(r_min, r_max, n_radii), dirs)?;
    let rows = rep.per_prime.iter().flat_map(|pd| {
        pd.octaves.iter().map(move |oc| {
            vec![pd.p.to_string(), num(oc.radius_min), num(oc.radius_max), num(oc.max_ratio), num(oc.running_max)]
        })
    });
    out.csv("jw_octaves.csv", &["p", "radius_min", "radius_max", "max_ratio", "running_max"], rows)?;
    let mut o = Outcome::default();
    o.output("product_exponent", rep.product_exponent);
    o.output("stable", rep.per_prime.iter().map(|p| (p.p, p.stable)).collect::<Vec<_>>());
    if let Some(e) = rep.product_exponent {
        o.gap("decay_exponent", e, -(primes.len() as f64) / 2.0 + 0.25);
    }
    if let Some(form_primes) = cfg.form_primes.clone() {
        let eps = *cfg.epsilon.get_or_insert(0.1);
        let stability = cfg.tolerance("stability", 2.0)?;
        let form = load_form(cfg, form_primes.iter().copied().max().unwrap_or(2))?;
        let threshold = 2f64.sqrt() - eps;
        let mut members = Vec::new();
        for &p in &form_primes {
            let lambda = form.lambda(p)?;
            if lambda.abs() > threshold {
                members.push(p);
            } else {
                o.warnings.push(format!("p = {p} is not in P_f({eps}): |λ(p)| = {:.6}", lambda.abs()));
            }
        }
        if members.is_empty() {
            o.warnings.push("no requested prime lies in P_f; the two-term bound check is vacuous".into());
        }
        let mut rows = Vec::new();
        for p in members {
            let prof = jw_constant_profile(&form, p, sigma, 10.0, 1e4, 9, 32)?;
            for oc in &prof.octaves {
                rows.push(vec![p.to_string(), num(oc.radius_min), num(oc.radius_max), num(oc.constant)]);
            }
            o.gap(&format!("octave_ratio_p{p}"), prof.max_adjacent_ratio, stability);
        }
        out.csv("automorphic_jw.csv", &["p", "radius_min", "radius_max", "constant"], rows)?;
    }
    Ok(o)
}

fn automorphic(cfg: &mut ExperimentConfig, out: &mut OutDir) -> R<Outcome> {
    let seed = cfg.seed(Experiment::AutomorphicDensity)?;
    let sigma = cfg.sigma_or(1.0)?;
    let primes = cfg.primes_or_limit(100)?;
    let n = cfg.resolution_or(256)?;
    let samples = ExperimentConfig::count(&mut cfg.samples, 1_000_000, "samples")?;
    let count = ExperimentConfig::count(&mut cfg.rectangles, 100, "rectangles")?;
    let tol = cfg.tolerance("gap", 0.01)?;
    let opts = construction_options(cfg)?;
    // the vertical-line comparison needs eigenvalues past the Euler cutoff
    let table = if cfg.t_max.is_some() { 100_000 } else { 0 };
    let form = load_form(cfg, table.max(*primes.iter().max().unwrap_or(&2)))?;
    let spec = w_grid(cfg, automorphic_support_radius(&form, sigma, &primes)?, n)?;
    let d = automorphic_density(&form, sigma, &primes, spec, &opts)?;
    let mc = automorphic_torus_histogram(&form, sigma, &primes, samples, seed, spec)?;
    let panel = RectangleRegion::random_panel(seed, count, &d.moment_box(3.0));
    let den: Vec<f64> = panel.iter().map(|r| d.integrate_rectangle(r)).collect();
    let hist: Vec<f64> = panel.iter().map(|r| mc.integrate_rectangle(r)).collect();
    write_density(out, "density", &d)?;
    out.csv(
        "rectangles.csv",
        &["u_min", "u_max", "v_min", "v_max", "monte_carlo", "density", "gap"],
        rectangle_rows(&panel, &hist, &den),
    )?;
    let mut o = Outcome::default();
    describe_density(&mut o, &d);
    o.gap("monte_carlo", max_gap(&hist, &den), tol);
    o.gap("conjugation_asymmetry", d.max_conjugation_asymmetry()?, cfg.tolerance("symmetry", 1e-3)?);
    if let Some(t_max) = cfg.t_max {
        if !(t_max > 0.0) {
            bail!("t_max must be positive");
        }
        let step = ExperimentConfig::positive(&mut cfg.step, 0.05, "step")?;
        let tail = cfg.tolerance("euler_tail", 0.05)?;
        let vtol = cfg.tolerance("vertical_gap", 0.02)?;
        let vert = AutomorphicSamples::new(&form, sigma, t_max, step, tail)?;
        let emp: Vec<f64> = panel.iter().map(|r| vert.fraction(r)).collect();
        out.csv(
            "vertical.csv",
            &["u_min", "u_max", "v_min", "v_max", "empirical", "density", "gap"],
            rectangle_rows(&panel, &emp, &den),
        )?;
        o.output("euler_cutoff", vert.cutoff);
        o.output("euler_tail_bound", vert.tail_bound);
        o.gap("vertical", max_gap(&emp, &den), vtol);
    }
    Ok(o)
}

fn sympow(cfg: &mut ExperimentConfig, out: &mut OutDir) -> R<Outcome> {
    let sigma = cfg.sigma_or(1.0)?;
    let primes = cfg.primes_or_limit(100)?;
    let mu = *cfg.mu.get_or_insert(3);
    let tol = cfg.tolerance("deviation", 1e-12)?;
    let form = load_form(cfg, *primes.iter().max().unwrap_or(&2))?;
    let rep = sym_diff_identity_check(&form, mu, sigma, &primes)?;
    out.json("identity.json", &rep)?;
    let rows = rep.rows.iter().map(|r| {
        vec![
            r.p.to_string(),
            num(r.difference.re),
            num(r.difference.im),
            num(r.endpoints.re),
            num(r.endpoints.im),
            num(r.deviation),
        ]
    });
    out.csv("identity.csv", &["p", "difference_re", "difference_im", "endpoints_re", "endpoints_im", "deviation"], rows)?;
    let mut o = Outcome::default();
    o.output("max_deviation", rep.max_deviation);
    o.output("total_difference", [rep.total_difference.re, rep.total_difference.im]);
    o.output("total_endpoints", [rep.total_endpoints.re, rep.total_endpoints.im]);
    o.gap("max_deviation", rep.max_deviation, tol);
    Ok(o)
}

fn census(cfg: &mut ExperimentConfig, out: &mut OutDir) -> R<Outcome> {
    let eps = *cfg.epsilon.get_or_insert(0.1);
    let x = *cfg.x.get_or_insert(100_000);
    if !(eps >= 0.0 && eps.is_finite()) {
        bail!("epsilon must be nonnegative");
    }
    let form = load_form(cfg, x)?;
    let c = pf_epsilon_census(&form, eps, x)?;
    c.write_csv(&out.path("census.csv"))?;
    let mut o = Outcome::default();
    o.output("count", c.count);
    o.output("total", c.total);
    o.output("density", c.density);
    o.output("exact_rows", c.exact_rows);
    if eps == 0.0 {
        let tol = cfg.tolerance("sato_tate", 0.02)?;
        o.gap("sato_tate", (c.density - (0.5 - 1.0 / PI)).abs(), tol);
    }
    Ok(o)
}

fn lambda(cfg: &mut ExperimentConfig, out: &mut OutDir) -> R<Outcome> {
    let sigma = cfg.sigma_or(1.5)?;
    let primes = cfg.primes_or_limit(20)?;
    let n_max = ExperimentConfig::count(&mut cfg.n_max, 10_000, "n_max")?;
    let zs = cfg.z_points(vec![Complex64::new(3.0, 4.0)]);
    let tol = cfg.tolerance("gap", 1e-6)?;
    let mut coeff_rows = Vec::new();
    let mut series_rows = Vec::new();
    let mut worst: f64 = 0.0;
    let mut o = Outcome::default();
    for &z in &zs {
        let table = lambda_coefficients(z, n_max)?;
        for n in 1..=n_max {
            let c = table.get(n);
            coeff_rows.push(vec![num(z.re), num(z.im), n.to_string(), num(c.re), num(c.im)]);
        }
        let s = mtilde_dirichlet(sigma, z, n_max, Some(&primes))?;
        let q = char_function_p(&primes, sigma, z)?;
        let gap = (s.value - q).norm();
        worst = worst.max(gap);
        if let Some(w) = &s.warning {
            o.warnings.push(format!("z = {z}: {w}"));
        }
        series_rows.push(vec![
            num(z.re),
            num(z.im),
            num(s.value.re),
            num(s.value.im),
            num(s.tail_estimate),
            num(q.re),
            num(q.im),
            num(gap),
        ]);
    }
    out.csv("lambda.csv", &["z_re", "z_im", "n", "re", "im"], coeff_rows)?;
    out.csv(
        "series.csv",
        &["z_re", "z_im", "series_re", "series_im", "tail_estimate", "product_re", "product_im", "gap"],
        series_rows,
    )?;
    o.gap("gap", worst, tol);
    Ok(o)
}
