use crate::euler::{neg_log_one_minus, PrimitiveFormData};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

fn check(form: &PrimitiveFormData, sigma: f64, primes: &[u64]) -> Result<()> {
    if sigma <= 0.5 {
        return Err(Error::Domain(format!("σ = {sigma} must exceed 1/2")));
    }
    if let Some(&p) = primes.iter().find(|&&p| form.divides_level(p)) {
        return Err(Error::Precondition(format!("p = {p} divides the level {}", form.level)));
    }
    Ok(())
}

/// `−Σ_{h=0}^{γ} Log(1 − α^{γ−h} β^h p^{−σ})` at one prime.
fn local_sym_power(form: &PrimitiveFormData, gamma: u32, sigma: f64, p: u64) -> Result<Complex64> {
    let (alpha, beta) = form.satake(p)?;
    let x = (p as f64).powf(-sigma);
    Ok((0..=gamma)
        .map(|h| neg_log_one_minus(alpha.powu(gamma - h) * beta.powu(h) * x))
        .sum())
}

/// `Σ_{p∈P} −Σ_{h=0}^{γ} Log(1 − α_f(p)^{γ−h} β_f(p)^h p^{−σ})`, the
/// truncated logarithm of the `γ`-th symmetric power L-function.
pub fn sym_power_log_partial(form: &PrimitiveFormData, gamma: u32, sigma: f64, primes: &[u64]) -> Result<Complex64> {
    check(form, sigma, primes)?;
    primes.iter().map(|&p| local_sym_power(form, gamma, sigma, p)).sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct SymIdentityRow {
    pub p: u64,
    /// `log L_p(Sym^μ) − log L_p(Sym^{μ−2})`.
    pub difference: Complex64,
    /// `−Log(1 − α^μ p^{−σ}) − Log(1 − β^μ p^{−σ})`.
    pub endpoints: Complex64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymIdentityReport {
    pub mu: u32,
    pub sigma: f64,
    pub rows: Vec<SymIdentityRow>,
    pub total_difference: Complex64,
    pub total_endpoints: Complex64,
    pub max_deviation: f64,
}

/// Compares the per-prime difference of the `Sym^μ` and `Sym^{μ−2}` local
/// logarithms with the two endpoint terms. The endpoint side uses Satake
/// angles rather than the powers multiplied out on the left.
pub fn sym_diff_identity_check(
    form: &PrimitiveFormData,
    mu: u32,
    sigma: f64,
    primes: &[u64],
) -> Result<SymIdentityReport> {
    if mu < 2 {
        return Err(Error::Domain(format!("μ = {mu} must be at least 2")));
    }
    check(form, sigma, primes)?;
    let mut rows = Vec::with_capacity(primes.len());
    for &p in primes {
        let difference = local_sym_power(form, mu, sigma, p)? - local_sym_power(form, mu - 2, sigma, p)?;
        let lambda = form.lambda(p)?;
        let angle = (0.5 * lambda).clamp(-1.0, 1.0).acos();
        let x = (p as f64).powf(-sigma);
        let endpoints = [1.0, -1.0]
            .iter()
            .map(|&s| -(Complex64::new(1.0, 0.0) - Complex64::from_polar(x, s * mu as f64 * angle)).ln())
            .sum();
        rows.push(SymIdentityRow { p, difference, endpoints, deviation: (difference - endpoints).norm() });
    }
    Ok(SymIdentityReport {
        mu,
        sigma,
        total_difference: rows.iter().map(|r| r.difference).sum(),
        total_endpoints: rows.iter().map(|r| r.endpoints).sum(),
        max_deviation: rows.iter().map(|r| r.deviation).fold(0.0, f64::max),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{euler_log_partial, primes_up_to};
    use crate::quadrature::ClosedCurve;

    fn delta() -> PrimitiveFormData {
        PrimitiveFormData::ramanujan_delta(100).unwrap()
    }

    #[test]
    fn gamma_zero_is_zeta() {
        let f = delta();
        let primes = [2, 3, 5, 7];
        let a = sym_power_log_partial(&f, 0, 1.3, &primes).unwrap();
        let b = euler_log_partial(Complex64::new(1.3, 0.0), &primes).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn gamma_one_is_the_form() {
        let f = delta();
        let a = sym_power_log_partial(&f, 1, 1.0, &[2, 3, 5]).unwrap();
        let b: Complex64 = [2, 3, 5]
            .iter()
            .map(|&p| super::super::automorphic_curve(&f, p, 1.0).unwrap().point(0.0))
            .sum();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn gamma_two_matches_polynomial_expansion() {
        let f = delta();
        let oracle: f64 = [2u64, 3]
            .iter()
            .map(|&p| {
                let l2 = f.lambda(p).unwrap().powi(2);
                let x = (p as f64).powi(-2);
                -(1.0 - (l2 - 1.0) * x + (l2 - 1.0) * x * x - x * x * x).ln()
            })
            .sum();
        let v = sym_power_log_partial(&f, 2, 2.0, &[2, 3]).unwrap();
        assert!((v.re - oracle).abs() < 1e-14 && v.im.abs() < 1e-14, "{v} vs {oracle}");
    }

    #[test]
    fn identity_holds_on_the_full_panel() {
        let f = delta();
        let primes = primes_up_to(100).unwrap().into_vec();
        for mu in 2..=5 {
            for sigma in [0.75, 1.0, 1.5, 2.0] {
                let r = sym_diff_identity_check(&f, mu, sigma, &primes).unwrap();
                assert!(r.max_deviation < 1e-12, "μ = {mu}, σ = {sigma}: {}", r.max_deviation);
            }
        }
    }

    #[test]
    fn mu_two_subtracts_the_zeta_factor() {
        let f = delta();
        let p = 11;
        let (a, b) = f.satake(p).unwrap();
        let x = 11f64.powf(-1.2);
        let expected = neg_log_one_minus(a * a * x) + neg_log_one_minus(b * b * x);
        let r = sym_diff_identity_check(&f, 2, 1.2, &[p]).unwrap();
        assert!((r.rows[0].difference - expected).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        let f = delta();
        assert!(sym_diff_identity_check(&f, 1, 1.0, &[2]).is_err());
        assert!(sym_power_log_partial(&f, 2, 0.5, &[2]).is_err());
        let g = PrimitiveFormData::from_eigenvalues(2, 11, [(11, -1.0), (2, -2.0 / 2f64.sqrt())].into()).unwrap();
        assert!(matches!(sym_power_log_partial(&g, 2, 1.0, &[11]), Err(Error::Precondition(_))));
    }
}
