//! Curves attached to a primitive form: the local maps
//! `θ ↦ −Log(1 − α p^{−σ}e^{2πiθ}) − Log(1 − β p^{−σ}e^{2πiθ})`, their
//! oscillatory integrals and derivative tests, the prime sets where those
//! tests succeed, symmetric-power Euler factors, and the resulting density.

mod census;
mod curve;
mod density;
mod partition;
mod sympow;

pub use census::{pf_epsilon_census, CensusRow, PfCensus};
pub use curve::{
    automorphic_curve, automorphic_curve_eval, jw_bound, jw_constant_profile, jw_type_integral, AutomorphicCurve,
    JwConstantProfile, JwOctave,
};
pub use density::{
    automorphic_density, automorphic_support_radius, automorphic_torus_histogram, empirical_w_automorphic,
    euler_tail_bound, AutomorphicSamples,
};
pub use partition::{
    derivative_partition, derivative_partition_unchecked, inflection_points, DerivativePartition, PARTITION_SAMPLES,
};
pub use sympow::{sym_diff_identity_check, sym_power_log_partial, SymIdentityReport, SymIdentityRow};
