//! Special functions on and around the critical line.

mod delta;
mod gamma;
mod riemann_siegel;
mod theta;
mod zeta;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use delta::{delta, ln_delta};
pub use gamma::{digamma, log_gamma};
pub use riemann_siegel::{hardy_z, rs_coefficients, RS_MIN_T};
pub use theta::{theta, theta_dd, theta_deriv, THETA_MIN_T, THETA_SWITCH};
pub use zeta::zeta_euler_maclaurin;

pub(crate) use zeta::zeta_regular_part;

use crate::{Error, Result};

/// Complex values of ζ and Δ.
pub type ComplexValue = Complex64;

/// Accuracy knobs for the zeta evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Number of Riemann–Siegel correction terms beyond `C_0` (0..=4).
    pub rs_correction_order: u32,
    /// Bernoulli terms in the Euler–Maclaurin tail.
    pub em_terms: usize,
    /// Target absolute error for Euler–Maclaurin.
    pub abs_tol: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { rs_correction_order: 4, em_terms: 12, abs_tol: 1e-13 }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::Config(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.rs_correction_order > 4 {
            return Err(Error::Config(format!(
                "rs_correction_order must be at most 4, got {}",
                self.rs_correction_order
            )));
        }
        Ok(())
    }
}

/// One evaluated point on the critical line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaSample {
    pub t: f64,
    pub theta: f64,
    /// Hardy's Z(t).
    pub z: f64,
    /// ζ(1/2 + it) = e^{−iθ} Z(t).
    pub zeta: ComplexValue,
}

impl ZetaSample {
    /// Largest deviation from `ζ = e^{−iθ}Z` and `|ζ| = |Z|`.
    pub fn invariant_defect(&self) -> f64 {
        let (sin, cos) = self.theta.sin_cos();
        let re = (self.zeta.re - cos * self.z).abs();
        let im = (self.zeta.im + sin * self.z).abs();
        let modulus = (self.zeta.norm() - self.z.abs()).abs();
        re.max(im).max(modulus)
    }
}

/// Assembles θ, Z and ζ at height `t`.
pub fn zeta_critical(t: f64, cfg: &EvalConfig) -> Result<ZetaSample> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain(format!("zeta_critical requires finite t >= 0, got {t}")));
    }
    let th = theta(t)?;
    let z = hardy_z(t, cfg)?;
    let zeta = Complex64::from_polar(1.0, -th) * z;
    Ok(ZetaSample { t, theta: th, z, zeta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_at_zero() {
        let s = zeta_critical(0.0, &EvalConfig::default()).unwrap();
        assert!((s.zeta.re + 1.460_354_5).abs() < 1e-7);
        assert!(s.zeta.im.abs() < 1e-12);
    }

    #[test]
    fn sample_invariants_hold() {
        let cfg = EvalConfig::default();
        for t in [3.0, 14.0, 123.4, 1000.0, 54321.0] {
            let s = zeta_critical(t, &cfg).unwrap();
            assert!(s.invariant_defect() <= 1e-9, "t = {t}");
        }
    }

    #[test]
    fn config_validation() {
        assert!(EvalConfig::default().validate().is_ok());
        assert!(EvalConfig { abs_tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(EvalConfig { rs_correction_order: 5, ..Default::default() }.validate().is_err());
    }
}
