use crate::{Error, Result};

/// `τ(1), …, τ(n_max)` from `Δ = q ∏_{n≥1} (1 − q^n)^{24}`.
///
/// Uses `∏(1 − q^n)^3 = Σ_{k≥0} (−1)^k (2k+1) q^{k(k+1)/2}` (Jacobi) and
/// raises that sparse series to the eighth power by repeated sparse×dense
/// products in checked 128-bit arithmetic. Index 0 of the result is unused.
pub fn ramanujan_tau_table(n_max: usize) -> Result<Vec<i128>> {
    if n_max == 0 {
        return Err(Error::EmptyDomain("τ table needs n_max ≥ 1".into()));
    }
    let len = n_max; // coefficients of q^0 … q^{n_max-1} of ∏(1-q^n)^24
    let mut sparse: Vec<(usize, i128)> = Vec::new();
    for k in 0usize.. {
        let e = k * (k + 1) / 2;
        if e >= len {
            break;
        }
        let c = (2 * k + 1) as i128;
        sparse.push((e, if k % 2 == 0 { c } else { -c }));
    }
    let mut dense = vec![0i128; len];
    for &(e, c) in &sparse {
        dense[e] = c;
    }
    let overflow = || Error::Range(format!("τ(n) for n ≤ {n_max} exceeds 128-bit range"));
    for _ in 1..8 {
        let mut next = vec![0i128; len];
        for &(e, c) in &sparse {
            for (i, &d) in dense[..len - e].iter().enumerate() {
                if d != 0 {
                    let prod = d.checked_mul(c).ok_or_else(overflow)?;
                    next[i + e] = next[i + e].checked_add(prod).ok_or_else(overflow)?;
                }
            }
        }
        dense = next;
    }
    let mut tau = Vec::with_capacity(n_max + 1);
    tau.push(0);
    tau.extend_from_slice(&dense);
    Ok(tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: expand q ∏_{n<N} (1 − q^n)^{24} factor by factor.
    fn tau_by_product(n_max: usize) -> Vec<i128> {
        let mut poly = vec![0i128; n_max];
        poly[0] = 1;
        for n in 1..n_max {
            for _ in 0..24 {
                for k in (n..n_max).rev() {
                    poly[k] -= poly[k - n];
                }
            }
        }
        let mut tau = vec![0];
        tau.extend(poly);
        tau
    }

    #[test]
    fn first_values() {
        let tau = ramanujan_tau_table(13).unwrap();
        assert_eq!(
            &tau[1..],
            &[1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944, -577738]
        );
    }

    #[test]
    fn agrees_with_direct_product() {
        let fast = ramanujan_tau_table(300).unwrap();
        let slow = tau_by_product(300);
        assert_eq!(fast, slow);
    }

    #[test]
    fn multiplicative() {
        let tau = ramanujan_tau_table(2000).unwrap();
        assert_eq!(tau[6], tau[2] * tau[3]);
        assert_eq!(tau[35], tau[5] * tau[7]);
        // Hecke recursion at prime powers: τ(p²) = τ(p)² − p^{11}
        assert_eq!(tau[4], tau[2] * tau[2] - 2i128.pow(11));
        assert_eq!(tau[1849], tau[43] * tau[43] - 43i128.pow(11));
    }

    #[test]
    fn zero_rejected() {
        assert!(ramanujan_tau_table(0).is_err());
    }
}
