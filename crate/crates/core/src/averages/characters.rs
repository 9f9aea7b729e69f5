use super::observable::Observable;
use crate::euler::{is_prime, neg_log_one_minus};
use crate::parallel;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// All Dirichlet characters modulo a prime `q`, indexed by
/// `χ_j(g^k) = e^{2πijk/(q−1)}` for the smallest primitive root `g`.
#[derive(Debug, Clone)]
pub struct DirichletCharacterTable {
    pub q: u64,
    pub primitive_root: u64,
    /// `dlog[a]` is the exponent `k` with `g^k ≡ a`; `dlog[0]` is unused.
    dlog: Vec<u32>,
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn smallest_primitive_root(q: u64) -> u64 {
    let phi = q - 1;
    let mut factors = Vec::new();
    let (mut m, mut f) = (phi, 2);
    while f * f <= m {
        if m % f == 0 {
            factors.push(f);
            while m % f == 0 {
                m /= f;
            }
        }
        f += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = mul_mod(r, b, q);
            }
            b = mul_mod(b, b, q);
            e >>= 1;
        }
        r
    };
    (2..q).find(|&g| factors.iter().all(|&f| pow(g, phi / f) != 1)).unwrap_or(1)
}

pub fn build_character_table(q: u64) -> Result<DirichletCharacterTable> {
    if q < 3 || !is_prime(q) {
        return Err(Error::Domain(format!("modulus {q} must be a prime ≥ 3")));
    }
    let g = smallest_primitive_root(q);
    let mut dlog = vec![0u32; q as usize];
    let mut x = 1;
    for k in 0..q - 1 {
        dlog[x as usize] = k as u32;
        x = mul_mod(x, g, q);
    }
    Ok(DirichletCharacterTable { q, primitive_root: g, dlog })
}

impl DirichletCharacterTable {
    /// Number of characters, `q − 1`.
    pub fn len(&self) -> usize {
        (self.q - 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// For prime `q` every non-principal character is primitive.
    pub fn is_primitive(&self, j: usize) -> bool {
        j % self.len() != 0
    }

    pub fn primitive_count(&self) -> usize {
        self.len() - 1
    }

    /// `k` with `g^k ≡ a (mod q)`, or `None` when `q | a`.
    pub fn discrete_log(&self, a: u64) -> Option<u64> {
        let r = a % self.q;
        (r != 0).then(|| self.dlog[r as usize] as u64)
    }

    pub fn chi(&self, j: usize, a: u64) -> Complex64 {
        match self.discrete_log(a) {
            None => Complex64::new(0.0, 0.0),
            Some(k) => {
                let e = (j as u64 % self.q.saturating_sub(1)) * k % (self.q - 1);
                Complex64::from_polar(1.0, 2.0 * PI * e as f64 / (self.q - 1) as f64)
            }
        }
    }
}

/// `−Σ_{p∈P} Log(1 − χ(p) p^{−σ})`; primes divisible by `q` contribute 0.
pub fn log_l_p_char(primes: &[u64], sigma: f64, table: &DirichletCharacterTable, j: usize) -> Result<Complex64> {
    if sigma <= 0.5 {
        return Err(Error::Domain(format!("σ = {sigma} must exceed 1/2")));
    }
    Ok(primes
        .iter()
        .map(|&p| neg_log_one_minus(table.chi(j, p) * (p as f64).powf(-sigma)))
        .sum())
}

/// Note attached when a prime of `P` equals the modulus.
pub fn modulus_warning(q: u64, primes: &[u64]) -> Option<String> {
    primes
        .contains(&q)
        .then(|| format!("modulus {q} lies in P; its Euler factor is dropped for every character"))
}

/// `(q − 2)^{-1} Σ_{χ primitive mod q} Φ(log L_P(σ, χ))`.
pub fn modulus_average<O: Observable + ?Sized>(q: u64, primes: &[u64], sigma: f64, phi: &O) -> Result<Complex64> {
    if q == 2 {
        return Err(Error::DegenerateModulus(q));
    }
    let table = build_character_table(q)?;
    let values =
        parallel::try_map_indexed(table.primitive_count(), |k| Ok::<_, Error>(phi.eval(log_l_p_char(primes, sigma, &table, k + 1)?)))?;
    let sum = values.into_iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b);
    Ok(sum / table.primitive_count() as f64)
}

/// Mean of [`modulus_average`] over the prime moduli `3 ≤ q ≤ m`.
pub fn ihara_outer_average<O: Observable + ?Sized>(m: u64, primes: &[u64], sigma: f64, phi: &O) -> Result<Complex64> {
    if m < 3 {
        return Err(Error::Domain(format!("m = {m} must be at least 3")));
    }
    let moduli: Vec<u64> = (3..=m).filter(|&q| is_prime(q)).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    for &q in &moduli {
        sum += modulus_average(q, primes, sigma, phi)?;
    }
    Ok(sum / moduli.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averages::TestFunction;
    use crate::euler::euler_log_partial;

    #[test]
    fn table_basics() {
        let t = build_character_table(5).unwrap();
        assert_eq!(t.primitive_count(), 3);
        let t = build_character_table(7).unwrap();
        assert_eq!(t.primitive_root, 3);
        assert!((t.chi(1, 3) - Complex64::from_polar(1.0, PI / 3.0)).norm() < 1e-15);
        assert!(build_character_table(9).is_err());
        assert!(build_character_table(2).is_err());
    }

    #[test]
    fn discrete_log_oracle() {
        // brute force powers of the root
        let t = build_character_table(101).unwrap();
        let mut x = 1u64;
        for k in 0..100 {
            assert_eq!(t.discrete_log(x), Some(k));
            x = x * t.primitive_root % 101;
        }
        assert_eq!(t.discrete_log(202), None);
    }

    #[test]
    fn multiplicative_and_orthogonal() {
        let t = build_character_table(13).unwrap();
        for j in 0..12 {
            assert_eq!(t.chi(j, 1), Complex64::new(1.0, 0.0));
            for a in 1..13 {
                for b in 1..13 {
                    assert!((t.chi(j, a * b) - t.chi(j, a) * t.chi(j, b)).norm() < 1e-12);
                }
            }
            if j != 0 {
                let s: Complex64 = (0..13).map(|a| t.chi(j, a)).sum();
                assert!(s.norm() < 1e-12);
            }
        }
        for a in 2..13 {
            let s: Complex64 = (0..12).map(|j| t.chi(j, a)).sum();
            assert!(s.norm() < 1e-12);
        }
    }

    #[test]
    fn monomials_average_like_the_torus() {
        // the mean of χ(2)^a χ(3)^b over all characters equals the torus mean
        // of e^{2πi(aθ₁ + bθ₂)} while 2^a 3^b ≢ 1 (mod q) for (a, b) ≠ 0
        let t = build_character_table(101).unwrap();
        for a in 0..4u32 {
            for b in 0..4u32 {
                let n = 2u64.pow(a) * 3u64.pow(b);
                let mean: Complex64 = (0..100).map(|j| t.chi(j, 2).powu(a) * t.chi(j, 3).powu(b)).sum::<Complex64>() / 100.0;
                let torus = if a == 0 && b == 0 { 1.0 } else { 0.0 };
                assert!(n % 101 != 1 || (a, b) == (0, 0));
                assert!((mean - Complex64::new(torus, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn log_l_examples() {
        let t = build_character_table(5).unwrap();
        // quadratic character: j = 2 (order 2)
        let v = log_l_p_char(&[2, 3], 1.0, &t, 2).unwrap();
        assert!((v.re - (-(1.5f64).ln() - (4.0f64 / 3.0).ln())).abs() < 1e-14 && v.im.abs() < 1e-14);
        assert!((log_l_p_char(&[2, 3, 5], 1.0, &t, 2).unwrap() - v).norm() < 1e-15);
        let principal = log_l_p_char(&[2, 3, 7], 1.5, &t, 0).unwrap();
        let e = euler_log_partial(Complex64::new(1.5, 0.0), &[2, 3, 7]).unwrap();
        assert!((principal - e).norm() < 1e-15);
    }

    #[test]
    fn constant_averages_to_one() {
        let one = TestFunction::Constant;
        assert_eq!(modulus_average(101, &[2, 3], 1.0, &one).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(ihara_outer_average(50, &[2, 3], 1.0, &one).unwrap(), Complex64::new(1.0, 0.0));
        assert!(matches!(modulus_average(2, &[3], 1.0, &one), Err(Error::DegenerateModulus(2))));
        let g = TestFunction::Gaussian { center: 0.0.into(), width: 0.5 };
        assert_eq!(ihara_outer_average(3, &[2], 1.0, &g).unwrap(), modulus_average(3, &[2], 1.0, &g).unwrap());
        assert!(modulus_warning(3, &[2, 3]).is_some());
    }
}
