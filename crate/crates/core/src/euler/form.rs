use super::primes::{is_prime, primes_up_to};
use super::tau::ramanujan_tau_table;
use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Unit-modulus roots `(α, β)` of `1 − λx + x² = (1 − αx)(1 − βx)`.
pub fn satake_pair(lambda: f64) -> Result<(Complex64, Complex64)> {
    if !(lambda.abs() <= 2.0) {
        return Err(Error::RamanujanViolation(lambda.abs()));
    }
    let half = 0.5 * lambda;
    let alpha = Complex64::new(half, (1.0 - half * half).max(0.0).sqrt());
    Ok((alpha, alpha.conj()))
}

/// Hecke data of a primitive form: normalised eigenvalues `λ_f(p)` and their
/// Satake parameters.
#[derive(Debug, Clone)]
pub struct PrimitiveFormData {
    pub weight: u32,
    pub level: u64,
    eigenvalues: BTreeMap<u64, f64>,
    satake: BTreeMap<u64, (Complex64, Complex64)>,
    // a(p) = λ_f(p)·p^{(k-1)/2} when the coefficients are integers
    coefficients: BTreeMap<u64, i128>,
}

impl PrimitiveFormData {
    /// Ramanujan's `Δ` (weight 12, level 1) with `λ(p) = τ(p)/p^{11/2}` for
    /// every prime `p ≤ prime_limit`.
    pub fn ramanujan_delta(prime_limit: u64) -> Result<Self> {
        let primes = primes_up_to(prime_limit)?;
        let tau = ramanujan_tau_table(prime_limit as usize)?;
        let coefficients: BTreeMap<u64, i128> =
            primes.iter().map(|&p| (p, tau[p as usize])).collect();
        let eigenvalues = coefficients
            .iter()
            .map(|(&p, &t)| (p, t as f64 / (p as f64).powf(5.5)))
            .collect();
        let mut form = Self::from_eigenvalues(12, 1, eigenvalues)?;
        form.coefficients = coefficients;
        Ok(form)
    }

    /// Builds the data from a table of eigenvalues. Primes not dividing the
    /// level must satisfy Deligne's bound `|λ(p)| ≤ 2`.
    pub fn from_eigenvalues(weight: u32, level: u64, eigenvalues: BTreeMap<u64, f64>) -> Result<Self> {
        if level == 0 {
            return Err(Error::Domain("level must be positive".into()));
        }
        let mut satake = BTreeMap::new();
        for (&p, &lambda) in &eigenvalues {
            if !is_prime(p) {
                return Err(Error::Domain(format!("{p} is not prime")));
            }
            let pair = if level % p == 0 {
                // bad prime: local factor (1 − λ p^{−s})^{−1}
                (Complex64::new(lambda, 0.0), Complex64::new(0.0, 0.0))
            } else {
                satake_pair(lambda)?
            };
            satake.insert(p, pair);
        }
        Ok(Self { weight, level, eigenvalues, satake, coefficients: BTreeMap::new() })
    }

    pub fn lambda(&self, p: u64) -> Result<f64> {
        self.eigenvalues
            .get(&p)
            .copied()
            .ok_or_else(|| Error::DataCoverage(format!("no eigenvalue for p = {p}")))
    }

    pub fn satake(&self, p: u64) -> Result<(Complex64, Complex64)> {
        self.satake
            .get(&p)
            .copied()
            .ok_or_else(|| Error::DataCoverage(format!("no eigenvalue for p = {p}")))
    }

    /// Integer coefficient `a(p)` if the form was built from exact data.
    pub fn exact_coefficient(&self, p: u64) -> Option<i128> {
        self.coefficients.get(&p).copied()
    }

    pub fn divides_level(&self, p: u64) -> bool {
        self.level % p == 0
    }

    /// Tabulated primes in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.eigenvalues.keys().copied()
    }

    pub fn eigenvalues(&self) -> &BTreeMap<u64, f64> {
        &self.eigenvalues
    }
}

/// Parses `p<TAB>lambda` records; blank lines and lines starting with `#`
/// are skipped.
pub fn parse_eigenvalue_file(text: &str) -> Result<BTreeMap<u64, f64>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim_end_matches('\r');
        if trimmed.starts_with('#') || trimmed.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        let (p, lambda) = trimmed
            .split_once('\t')
            .ok_or_else(|| err("expected `p<TAB>lambda`".into()))?;
        let p: u64 = p.trim().parse().map_err(|e| err(format!("prime: {e}")))?;
        let lambda: f64 = lambda.trim().parse().map_err(|e| err(format!("lambda: {e}")))?;
        if !is_prime(p) {
            return Err(err(format!("{p} is not prime")));
        }
        if !lambda.is_finite() {
            return Err(err("lambda must be finite".into()));
        }
        if out.insert(p, lambda).is_some() {
            return Err(err(format!("prime {p} listed twice")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn satake_examples() {
        let (a, b) = satake_pair(2.0).unwrap();
        assert_eq!((a, b), (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)));
        let (a, b) = satake_pair(0.0).unwrap();
        assert!((a - Complex64::i()).norm() < 1e-15 && (b + Complex64::i()).norm() < 1e-15);
        assert!(matches!(satake_pair(2.5), Err(Error::RamanujanViolation(_))));
        assert!(satake_pair(f64::NAN).is_err());

        let lambda = -24.0 / 2f64.powf(5.5);
        assert!((lambda + 0.5303301).abs() < 1e-7);
        let (a, b) = satake_pair(lambda).unwrap();
        // quadratic-root oracle: roots of x² − λx + 1
        let disc = Complex64::new(lambda * lambda - 4.0, 0.0).sqrt();
        let r1 = (Complex64::new(lambda, 0.0) + disc) * 0.5;
        assert!((a - r1).norm() < 1e-14 || (b - r1).norm() < 1e-14);
        assert!(((a * b) - 1.0).norm() < 1e-14);
        assert!((a.norm() - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn satake_reconstructs_lambda(lambda in -2.0f64..=2.0) {
            let (a, b) = satake_pair(lambda).unwrap();
            prop_assert!(((a + b).re - lambda).abs() < 1e-14);
            prop_assert!((a + b).im.abs() < 1e-14);
            prop_assert!((a * b - 1.0).norm() < 1e-14);
            prop_assert!((b - a.conj()).norm() == 0.0);
        }
    }

    #[test]
    fn delta_satisfies_deligne() {
        let f = PrimitiveFormData::ramanujan_delta(10_000).unwrap();
        assert_eq!(f.primes().count(), 1229);
        for p in f.primes() {
            assert!(f.lambda(p).unwrap().abs() <= 2.0, "p = {p}");
            let (a, b) = f.satake(p).unwrap();
            assert!(((a + b).re - f.lambda(p).unwrap()).abs() < 1e-14);
        }
        assert_eq!(f.exact_coefficient(2), Some(-24));
        assert!(matches!(f.lambda(10_007), Err(Error::DataCoverage(_))));
    }

    #[test]
    fn eigenvalue_file() {
        let text = "# weight 12\n2\t-0.5303300858899106\n3\t0.5987\n\n5\t1.0e-1\n";
        let m = parse_eigenvalue_file(text).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m[&5], 0.1);
        assert!(matches!(parse_eigenvalue_file("2\t0.1\n2\t0.2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_eigenvalue_file("4\t0.1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_eigenvalue_file("2 0.1\n"), Err(Error::Parse { .. })));
        let form = PrimitiveFormData::from_eigenvalues(2, 11, m).unwrap();
        assert!(form.divides_level(11) && !form.divides_level(2));
        let bad: BTreeMap<u64, f64> = [(3, 2.5)].into_iter().collect();
        assert!(PrimitiveFormData::from_eigenvalues(2, 1, bad).is_err());
    }
}
