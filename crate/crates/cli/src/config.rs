use mfunc_core::density::DensityMethod;
use mfunc_core::euler::{first_primes, primes_up_to};
use mfunc_core::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// An invalid or incomplete configuration (exit status 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub type ConfigResult<T> = Result<T, ConfigError>;

macro_rules! bail {
    ($($arg:tt)*) => { return Err($crate::config::ConfigError(format!($($arg)*)).into()) };
}
pub(crate) use bail;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Density,
    Invert,
    BohrJessen,
    ChiTau,
    CharAvg,
    JwReport,
    AutomorphicDensity,
    SympowIdentity,
    PfCensus,
    LambdaCoeffs,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Density => "density",
            Self::Invert => "invert",
            Self::BohrJessen => "bohr-jessen",
            Self::ChiTau => "chi-tau",
            Self::CharAvg => "char-avg",
            Self::JwReport => "jw-report",
            Self::AutomorphicDensity => "automorphic-density",
            Self::SympowIdentity => "sympow-identity",
            Self::PfCensus => "pf-census",
            Self::LambdaCoeffs => "lambda-coeffs",
        }
    }

    pub fn stochastic(self) -> bool {
        matches!(self, Self::BohrJessen | Self::AutomorphicDensity)
    }
}

/// Source of the characteristic function for `invert`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvertSource {
    /// Product of one-prime factors for the configured primes.
    Primes,
    /// `exp(−|z|²/2)`, whose density is the standard Gaussian.
    Gaussian,
    /// A grid read from `char_function` (CSV) and its JSON sidecar.
    File,
}

/// One experiment, as a single JSON document. Absent fields take the
/// experiment's defaults; the report records the resolved document.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Explicit prime set; takes precedence over `prime_count` and `prime_limit`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime_limit: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    /// Grid half width; defaults to 1.2 × the support radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<DensityMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<InvertSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub char_function: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rectangles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Evaluation points `[re, im]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moduli: Option<Vec<u64>>,
    /// Gaussian test function width.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
    /// Primes of the form checked against the two-term decay bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form_primes: Option<Vec<u64>>,
    /// Eigenvalue table `p λ(p)` per line; Ramanujan's Δ when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Census bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

/// Parses `key=value`, reading `value` as JSON and falling back to a string.
pub fn parse_assignment(s: &str) -> ConfigResult<(String, Value)> {
    let Some((key, value)) = s.split_once('=') else {
        bail!("expected key=value, got `{s}`");
    };
    let key = key.trim();
    if key.is_empty() {
        bail!("empty key in `{s}`");
    }
    let value = serde_json::from_str(value.trim()).unwrap_or_else(|_| Value::String(value.trim().to_string()));
    Ok((key.to_string(), value))
}

/// Reads `path` (if any), applies `--param` and `--tolerance` overrides and
/// deserialises the result.
pub fn load(
    path: Option<&Path>,
    params: &[(String, Value)],
    tolerances: &[(String, Value)],
) -> ConfigResult<ExperimentConfig> {
    let mut doc = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<Value>(&text).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Map::new()),
    };
    let Value::Object(obj) = &mut doc else {
        bail!("config must be a JSON object");
    };
    for (k, v) in params {
        obj.insert(k.clone(), v.clone());
    }
    if !tolerances.is_empty() {
        let tol = obj.entry("tolerances").or_insert_with(|| Value::Object(Map::new()));
        let Value::Object(tol) = tol else {
            bail!("`tolerances` must be an object");
        };
        for (k, v) in tolerances {
            tol.insert(k.clone(), v.clone());
        }
    }
    serde_json::from_value(doc).map_err(|e| ConfigError(format!("config: {e}")))
}

impl ExperimentConfig {
    pub fn sigma_or(&mut self, default: f64) -> ConfigResult<f64> {
        let s = *self.sigma.get_or_insert(default);
        if !(s > 0.5 && s.is_finite()) {
            bail!("sigma = {s} must be a finite number above 1/2");
        }
        Ok(s)
    }

    /// Resolves the prime set, defaulting to the first `count` primes.
    pub fn primes_or_first(&mut self, count: usize) -> ConfigResult<Vec<u64>> {
        let primes = match (&self.primes, self.prime_count, self.prime_limit) {
            (Some(p), _, _) => p.clone(),
            (None, Some(n), _) => first_primes(n),
            (None, None, Some(x)) => primes_up_to(x).map_err(|e| ConfigError(e.to_string()))?.into_vec(),
            (None, None, None) => first_primes(count),
        };
        mfunc_core::euler::check_prime_set(&primes).map_err(|e| ConfigError(e.to_string()))?;
        self.primes = Some(primes.clone());
        Ok(primes)
    }

    /// Resolves the prime set, defaulting to the primes up to `limit`.
    pub fn primes_or_limit(&mut self, limit: u64) -> ConfigResult<Vec<u64>> {
        if self.primes.is_none() && self.prime_count.is_none() && self.prime_limit.is_none() {
            self.prime_limit = Some(limit);
        }
        self.primes_or_first(0)
    }

    pub fn resolution_or(&mut self, default: usize) -> ConfigResult<usize> {
        let n = *self.resolution.get_or_insert(default);
        if n < 64 || !n.is_power_of_two() {
            bail!("resolution = {n} must be a power of two ≥ 64");
        }
        Ok(n)
    }

    pub fn positive(value: &mut Option<f64>, default: f64, name: &str) -> ConfigResult<f64> {
        let v = *value.get_or_insert(default);
        if !(v > 0.0 && v.is_finite()) {
            bail!("{name} = {v} must be positive");
        }
        Ok(v)
    }

    pub fn count(value: &mut Option<usize>, default: usize, name: &str) -> ConfigResult<usize> {
        let v = *value.get_or_insert(default);
        if v == 0 {
            bail!("{name} must be positive");
        }
        Ok(v)
    }

    pub fn tolerance(&mut self, name: &str, default: f64) -> ConfigResult<f64> {
        let v = *self.tolerances.entry(name.to_string()).or_insert(default);
        if !(v > 0.0 && v.is_finite()) {
            bail!("tolerance {name} = {v} must be positive");
        }
        Ok(v)
    }

    pub fn seed(&self, experiment: Experiment) -> ConfigResult<u64> {
        match self.seed {
            Some(s) => Ok(s),
            None => bail!("{} is stochastic and needs --seed", experiment.name()),
        }
    }

    pub fn z_points(&mut self, default: Vec<Complex64>) -> Vec<Complex64> {
        let pts = self.z.get_or_insert_with(|| default.iter().map(|z| [z.re, z.im]).collect());
        pts.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
    }
}
