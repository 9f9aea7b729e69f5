//! Characteristic functions of the finite-`P` measures, their decay, the
//! Dirichlet-series side built from `λ_z(n)`, and inversion to densities.
//!
//! Transform convention: `M̃(z) = ∫ M(w) exp(i⟨z, w⟩) |dw|` and
//! `M(w) = ∫ M̃(z) exp(−i⟨z, w⟩) |dz|`, both measures carrying `(2π)^{-1}`.

mod charfn;
mod decay;
mod fft;
mod invert;
mod lambda;

pub use charfn::{
    char_function_p, dual_spec, one_prime_char_factor, CharFunctionGrid, DecayMetadata, ProductCharFunction,
};
pub use decay::{
    fit_decay_exponent, jw_decay_report, least_squares_slope, log_spaced, JwDecayReport, OctaveRatio, PrimeDecay,
    STABILITY_THRESHOLD,
};
pub use invert::{invert_char_function, InversionOptions};
pub use lambda::{
    generalized_mtilde, lambda_coefficients, mtilde_dirichlet, prime_power_coefficients, DirichletSum, LambdaTable,
    DEFAULT_TAIL_TOLERANCE,
};

pub(crate) use fft::fft2;
