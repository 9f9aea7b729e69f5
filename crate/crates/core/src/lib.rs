//! Explicit construction of M-functions: the densities that describe how
//! values of `log ζ`, Dirichlet `log L` and automorphic `log L_f` are
//! distributed in the complex plane, together with the empirical averages
//! (vertical lines, continuous characters, Dirichlet characters) that those
//! densities are supposed to reproduce.
//!
//! The crate is organised along the construction chain:
//!
//! * [`euler`]: primes, Euler-factor logarithms, `ζ(s)` by Euler–Maclaurin,
//!   Ramanujan `τ(n)` and Satake parameters.
//! * [`density`]: grid densities in the `w`-plane, single-prime curve
//!   measures, torus Monte Carlo, convolution and the finite-`P` density.
//! * [`fourier`]: characteristic functions, decay diagnostics, the
//!   `λ_z(n)` Dirichlet-series side and inversion back to densities.
//! * [`averages`]: vertical-line, `χ_τ` and Dirichlet-character averages.
//! * [`automorphic`]: curves attached to a primitive form, the derivative
//!   test partition, symmetric powers and the automorphic density.
//!
//! All measures use the planar normalisation `|dw| = (2π)^{-1} du dv`.
//!
//! With the default `parallel` feature the inner loops run on rayon; without
//! it every routine falls back to a sequential loop with identical output.

pub mod automorphic;
pub mod averages;
pub mod density;
pub mod error;
pub mod euler;
pub mod fourier;
pub mod parallel;
pub mod quadrature;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64;
