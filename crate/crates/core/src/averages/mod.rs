//! Finite versions of the averages that an M-function is supposed to
//! reproduce: vertical lines of `ζ`, the continuous characters
//! `χ_τ(p) = p^{−iτ}`, and primitive Dirichlet characters to prime moduli,
//! plus torus integrals that serve as their common limit.

mod characters;
mod observable;
mod torus;
mod vertical;

pub use characters::{
    build_character_table, ihara_outer_average, log_l_p_char, modulus_average, modulus_warning,
    DirichletCharacterTable,
};
pub use observable::{Observable, TestFunction};
pub use torus::{korobov_generator, torus_integral, TorusOptions};
pub use vertical::{chi_tau_average, empirical_w, vertical_samples, EmpiricalDistribution};
