use crate::euler::{primes_up_to, PrimitiveFormData};
use crate::parallel;
use crate::{Error, Result};
use num_bigint::BigInt;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct CensusRow {
    pub p: u64,
    pub lambda: f64,
    pub in_pf: bool,
    pub abs_lambda: f64,
}

/// Membership of every prime `p ≤ x` in `P_f(ε) = {p : |λ_f(p)| > √2 − ε}`.
#[derive(Debug, Clone, Serialize)]
pub struct PfCensus {
    pub epsilon: f64,
    pub x: u64,
    pub threshold: f64,
    /// Rows decided by exact integer comparison.
    pub exact_rows: usize,
    pub rows: Vec<CensusRow>,
    pub count: usize,
    pub total: usize,
    pub density: f64,
}

impl PfCensus {
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.rows.iter().filter(|r| r.in_pf).map(|r| r.p)
    }

    /// Writes `p,lambda,in_Pf,abs_lambda`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["p", "lambda", "in_Pf", "abs_lambda"])?;
        for r in &self.rows {
            w.write_record([
                r.p.to_string(),
                r.lambda.to_string(),
                r.in_pf.to_string(),
                r.abs_lambda.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `a² > 2·p^{k−1}`, i.e. `|λ| > √2` for `λ = a·p^{−(k−1)/2}`.
fn exceeds_sqrt2(a: i128, p: u64, weight: u32) -> bool {
    let lhs = BigInt::from(a) * BigInt::from(a);
    let rhs = BigInt::from(2) * BigInt::from(p).pow(weight.saturating_sub(1));
    lhs > rhs
}

/// Census of `P_f(ε)` among the primes up to `x`.
///
/// At `ε = 0` with integer coefficients the comparison is exact; a threshold
/// `√2 − ε ≤ 0` admits every prime with `λ_f(p) ≠ 0`.
pub fn pf_epsilon_census(form: &PrimitiveFormData, epsilon: f64, x: u64) -> Result<PfCensus> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::Domain(format!("ε = {epsilon} must be a nonnegative number")));
    }
    let primes: Vec<u64> =
        primes_up_to(x)?.into_vec().into_iter().filter(|&p| !form.divides_level(p)).collect();
    if primes.is_empty() {
        return Err(Error::EmptyDomain(format!("no good primes up to {x}")));
    }
    let threshold = 2f64.sqrt() - epsilon;
    let rows = parallel::try_map_indexed(primes.len(), |k| {
        let p = primes[k];
        let lambda = form.lambda(p)?;
        let (in_pf, exact) = match form.exact_coefficient(p) {
            Some(a) if epsilon == 0.0 => (exceeds_sqrt2(a, p, form.weight), true),
            Some(a) if threshold <= 0.0 => (a != 0, true),
            _ if threshold <= 0.0 => (lambda != 0.0, false),
            _ => (lambda.abs() > threshold, false),
        };
        Ok::<_, Error>((CensusRow { p, lambda, in_pf, abs_lambda: lambda.abs() }, exact))
    })?;
    let exact_rows = rows.iter().filter(|(_, e)| *e).count();
    let rows: Vec<CensusRow> = rows.into_iter().map(|(r, _)| r).collect();
    let count = rows.iter().filter(|r| r.in_pf).count();
    let total = rows.len();
    Ok(PfCensus { epsilon, x, threshold, exact_rows, rows, count, total, density: count as f64 / total as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn two_is_excluded_for_delta() {
        let f = PrimitiveFormData::ramanujan_delta(100).unwrap();
        let c = pf_epsilon_census(&f, 0.1, 100).unwrap();
        let r2 = &c.rows[0];
        assert_eq!(r2.p, 2);
        assert!(!r2.in_pf);
        assert!((r2.abs_lambda - 0.5303).abs() < 1e-4);
        assert_eq!(c.members().next(), Some(47));
        assert_eq!(c.total, 25);
    }

    #[test]
    fn large_epsilon_admits_every_nonzero_eigenvalue() {
        let f = PrimitiveFormData::ramanujan_delta(200).unwrap();
        let c = pf_epsilon_census(&f, 1.5, 200).unwrap();
        assert_eq!(c.count, c.total);
        assert_eq!(c.exact_rows, c.total);
    }

    #[test]
    fn exact_and_float_comparisons_agree_away_from_the_boundary() {
        let f = PrimitiveFormData::ramanujan_delta(2000).unwrap();
        let exact = pf_epsilon_census(&f, 0.0, 2000).unwrap();
        let float = pf_epsilon_census(&f, 1e-300, 2000).unwrap();
        assert_eq!(exact.exact_rows, exact.total);
        assert_eq!(float.exact_rows, 0);
        for (a, b) in exact.rows.iter().zip(&float.rows) {
            assert_eq!(a.in_pf, b.in_pf, "p = {}", a.p);
        }
    }

    #[test]
    fn sato_tate_density_oracle() {
        // ∫ (2/π) sin²θ over {|2cos θ| > √2} by the midpoint rule
        let n = 1_000_000;
        let h = PI / n as f64;
        let mass: f64 = (0..n)
            .map(|k| (k as f64 + 0.5) * h)
            .filter(|t| (2.0 * t.cos()).abs() > 2f64.sqrt())
            .map(|t| 2.0 / PI * t.sin().powi(2) * h)
            .sum();
        assert!((mass - (0.5 - 1.0 / PI)).abs() < 1e-9);
    }

    #[test]
    fn missing_eigenvalue_is_a_data_coverage_error() {
        let f = PrimitiveFormData::ramanujan_delta(100).unwrap();
        assert!(matches!(pf_epsilon_census(&f, 0.1, 200), Err(Error::DataCoverage(_))));
    }
}
