//! Measures and densities in the `w`-plane.
//!
//! The chain is: single-prime curve measure → convolution over a finite
//! prime set `P` (or, equivalently, pushforward of Haar measure on the
//! `|P|`-torus) → the finite-`P` density, whose limit as `P` grows is the
//! M-function.

mod construct;
mod convolve;
mod curve;
mod grid;
mod torus;

pub use construct::{default_grid, m_sigma_p, ConstructionOptions, DensityMethod};
pub use convolve::convolve;
pub use curve::{prime_curve_measure, CurveMeasure};
pub use grid::{GridDensity, GridSpec, Provenance, RectangleRegion};
pub use torus::{support_radius, torus_histogram};

pub(crate) use construct::{edge_decay, invert_curve_product};
pub(crate) use torus::pushforward_histogram;
