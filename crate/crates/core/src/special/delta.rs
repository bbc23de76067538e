//! The functional-equation factor Δ(s) = 2^s π^{s−1} Γ(1−s) sin(πs/2).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{ln_sin, log_gamma};
use crate::{Error, Result};

/// Δ(s), so that ζ(s) = Δ(s) ζ(1−s).
///
/// Evaluated in log-space. For `Re s ≥ 1/2` the reflected form
/// `(2π)^s / (2 Γ(s) cos(πs/2))` is used so that `Γ` is only ever taken in
/// the right half-plane. Poles sit at the odd positive integers; the
/// non-positive even integers are zeros.
pub fn delta(s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::domain(format!("delta of non-finite argument {s}")));
    }
    if s.im == 0.0 && s.re == s.re.round() {
        let k = s.re as i64;
        if k >= 1 && k % 2 == 1 {
            return Err(Error::Pole { re: s.re, im: s.im });
        }
        if k <= 0 && k % 2 == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
    }
    Ok(ln_delta(s)?.exp())
}

/// `ln Δ(s)` modulo `2πi`.
pub fn ln_delta(s: Complex64) -> Result<Complex64> {
    let ln2pi = (2.0 * PI).ln();
    if s.re >= 0.5 {
        let lg = log_gamma(s)?;
        // cos w = sin(w + π/2)
        let ln_cos = ln_sin(s * (PI / 2.0) + PI / 2.0);
        Ok(s * ln2pi - 2f64.ln() - lg - ln_cos)
    } else {
        let one = Complex64::new(1.0, 0.0);
        let lg = log_gamma(one - s)?;
        Ok(s * 2f64.ln() + (s - 1.0) * PI.ln() + lg + ln_sin(s * (PI / 2.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::theta;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reflection_product_is_one() {
        let s = c(0.3, 5.0);
        let p = delta(s).unwrap() * delta(c(1.0, 0.0) - s).unwrap();
        assert!((p - 1.0).norm() <= 1e-10);
    }

    #[test]
    fn unimodular_on_critical_line() {
        assert!((delta(c(0.5, 50.0)).unwrap().norm() - 1.0).abs() <= 1e-10);
        assert!((delta(c(0.5, 1e5)).unwrap().norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn argument_is_minus_twice_theta() {
        let t = 30.0;
        let d = delta(c(0.5, t)).unwrap();
        let expected = Complex64::from_polar(1.0, -2.0 * theta(t).unwrap());
        assert!((d - expected).norm() <= 1e-8);
    }

    #[test]
    fn poles_and_zeros() {
        assert!(matches!(delta(c(1.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(delta(c(3.0, 0.0)), Err(Error::Pole { .. })));
        assert_eq!(delta(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(delta(c(-4.0, 0.0)).unwrap(), c(0.0, 0.0));
        // Δ(2) = ζ(2)/ζ(-1) = (π²/6)/(-1/12) = -2π²
        assert!((delta(c(2.0, 0.0)).unwrap() - c(-2.0 * PI * PI, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn matches_direct_formula_for_moderate_arguments() {
        for s in [c(0.3, 2.0), c(2.5, -1.5), c(-1.2, 0.7), c(0.9, 10.0)] {
            let one = c(1.0, 0.0);
            let gamma = log_gamma(one - s).unwrap().exp();
            let direct = c(2.0, 0.0).powc(s) * c(PI, 0.0).powc(s - 1.0) * gamma * (s * (PI / 2.0)).sin();
            let got = delta(s).unwrap();
            assert!((got - direct).norm() <= 1e-12 * direct.norm().max(1.0), "s = {s}");
        }
    }
}
