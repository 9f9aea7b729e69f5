//! Euler-product primitives: primes, principal logarithms of local factors,
//! `ζ(s)` and `log ζ` on vertical lines, and Hecke eigenvalue data.

mod form;
mod local;
mod primes;
mod tau;
mod zeta;

pub use form::{parse_eigenvalue_file, satake_pair, PrimitiveFormData};
pub use local::{euler_log_partial, local_log_term, neg_log_one_minus, PrimeCurve};
pub use primes::{check_prime_set, first_primes, is_prime, primes_up_to, PrimeList};
pub use tau::ramanujan_tau_table;
pub use zeta::{
    log_zeta_line, zeta, zeta_eval, zeta_on_line, BranchMode, LogZetaLine, ZetaConfig,
};
