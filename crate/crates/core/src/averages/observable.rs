use crate::density::RectangleRegion;
use crate::quadrature::pairing;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A function `Φ: ℂ → ℂ` to be averaged.
pub trait Observable: Sync {
    fn eval(&self, w: Complex64) -> Complex64;
}

impl<F: Fn(Complex64) -> Complex64 + Sync> Observable for F {
    fn eval(&self, w: Complex64) -> Complex64 {
        self(w)
    }
}

/// Built-in test functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `Φ ≡ 1`.
    Constant,
    /// Indicator of a half-open rectangle.
    Rectangle { region: RectangleRegion },
    /// `exp(−|w − c|² / 2s²)`.
    Gaussian { center: Complex64, width: f64 },
    /// `1 / (1 + |w − c|²/s²)`.
    Lorentzian { center: Complex64, width: f64 },
    /// `Re w`.
    RealPart,
    /// `ψ_z(w) = exp(i⟨z, w⟩)`.
    FourierKernel { z: Complex64 },
}

impl TestFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TestFunction::Rectangle { region } => {
                RectangleRegion::new(region.u_min, region.u_max, region.v_min, region.v_max).map(|_| ())
            }
            TestFunction::Gaussian { width, .. } | TestFunction::Lorentzian { width, .. } if !(width > 0.0) => {
                Err(Error::Domain(format!("test function width {width} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

impl Observable for TestFunction {
    fn eval(&self, w: Complex64) -> Complex64 {
        match *self {
            TestFunction::Constant => Complex64::new(1.0, 0.0),
            TestFunction::Rectangle { region } => Complex64::new(if region.contains(w) { 1.0 } else { 0.0 }, 0.0),
            TestFunction::Gaussian { center, width } => {
                Complex64::new((-(w - center).norm_sqr() / (2.0 * width * width)).exp(), 0.0)
            }
            TestFunction::Lorentzian { center, width } => {
                Complex64::new(1.0 / (1.0 + (w - center).norm_sqr() / (width * width)), 0.0)
            }
            TestFunction::RealPart => Complex64::new(w.re, 0.0),
            TestFunction::FourierKernel { z } => Complex64::from_polar(1.0, pairing(z, w)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluations() {
        let w = Complex64::new(0.3, -0.4);
        assert_eq!(TestFunction::Constant.eval(w), Complex64::new(1.0, 0.0));
        assert_eq!(TestFunction::RealPart.eval(w).re, 0.3);
        let g = TestFunction::Gaussian { center: 0.0.into(), width: 0.5 };
        assert!((g.eval(w).re - (-0.25f64 / 0.5).exp()).abs() < 1e-15);
        let k = TestFunction::FourierKernel { z: Complex64::new(1.0, 1.0) };
        assert!((k.eval(w) - Complex64::from_polar(1.0, -0.1)).norm() < 1e-15);
        let r = TestFunction::Rectangle { region: RectangleRegion::new(0.0, 1.0, -1.0, 0.0).unwrap() };
        assert_eq!(r.eval(w).re, 1.0);
        let closure = |w: Complex64| w * 2.0;
        assert_eq!(closure.eval(w), w * 2.0);
    }

    #[test]
    fn validation_and_serde() {
        assert!(TestFunction::Gaussian { center: 0.0.into(), width: 0.0 }.validate().is_err());
        let g = TestFunction::Gaussian { center: Complex64::new(0.1, 0.0), width: 0.5 };
        let json = serde_json::to_string(&g).unwrap();
        assert!(json.contains("\"kind\":\"gaussian\""));
        assert_eq!(serde_json::from_str::<TestFunction>(&json).unwrap(), g);
    }
}
