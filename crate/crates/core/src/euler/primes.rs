use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::Deref;

/// All primes up to `limit`, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeList {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeList {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.primes
    }
}

impl Deref for PrimeList {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.primes
    }
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Result<PrimeList> {
    if limit < 2 {
        return Err(Error::EmptyDomain(format!("no primes up to {limit}")));
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    Ok(PrimeList { limit, primes })
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    // p_n < n (ln n + ln ln n) for n ≥ 6
    let n = count.max(6) as f64;
    let bound = (n * (n.ln() + n.ln().ln())).ceil() as u64 + 1;
    let mut list = primes_up_to(bound.max(13)).expect("bound ≥ 2").into_vec();
    list.truncate(count);
    list
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Checks that `primes` is a set of distinct primes.
pub fn check_prime_set(primes: &[u64]) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for &p in primes {
        if !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        if !seen.insert(p) {
            return Err(Error::Domain(format!("prime {p} repeated")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_limits() {
        assert_eq!(primes_up_to(10).unwrap().as_slice(), &[2, 3, 5, 7]);
        assert_eq!(primes_up_to(2).unwrap().as_slice(), &[2]);
        assert!(matches!(primes_up_to(1), Err(Error::EmptyDomain(_))));
    }

    #[test]
    fn million_matches_trial_division_count() {
        let list = primes_up_to(1_000_000).unwrap();
        assert_eq!(list.len(), 78_498);
        // independent oracle: trial division on a sample of windows
        for start in [2u64, 500_000, 999_000] {
            let expected: Vec<u64> = (start..start + 1000).filter(|&n| is_prime(n)).collect();
            let got: Vec<u64> =
                list.iter().copied().filter(|&p| p >= start && p < start + 1000).collect();
            assert_eq!(got, expected);
        }
        assert!(list.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn first_primes_prefix() {
        assert_eq!(first_primes(10), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(first_primes(1000).len(), 1000);
        assert_eq!(first_primes(1000)[999], 7919);
    }

    #[test]
    fn prime_set_validation() {
        assert!(check_prime_set(&[2, 3, 5]).is_ok());
        assert!(check_prime_set(&[2, 4]).is_err());
        assert!(check_prime_set(&[3, 3]).is_err());
    }
}
