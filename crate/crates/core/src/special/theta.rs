//! The Riemann–Siegel theta function and its derivative.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{digamma, log_gamma};
use crate::sum::{DoubleDouble, LN2_DD, LN_2PI_DD, PI_DD};
use crate::{Error, Result};

/// Above this height theta comes from its Stirling expansion.
pub const THETA_SWITCH: f64 = 30.0;

/// Location of the global minimum of theta on `[0, ∞)`.
pub const THETA_MIN_T: f64 = 2.0 * PI;

/// θ(t) = Im ln Γ(1/4 + it/2) − (t/2) ln π, with θ(0) = 0.
pub fn theta(t: f64) -> Result<f64> {
    Ok(theta_dd(t)?.to_f64())
}

/// Theta as a double-double. For `t > 30` the leading terms are carried in
/// extended precision so that `θ(t) − (πn − φ)` can be resolved well below
/// one ulp of `θ(t)`.
pub fn theta_dd(t: f64) -> Result<DoubleDouble> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain(format!("theta requires finite t >= 0, got {t}")));
    }
    if t <= THETA_SWITCH {
        return Ok(DoubleDouble::from_f64(theta_from_log_gamma(t)));
    }
    Ok(theta_asymptotic_dd(t))
}

pub(crate) fn theta_from_log_gamma(t: f64) -> f64 {
    let lg = log_gamma(Complex64::new(0.25, 0.5 * t)).expect("1/4 + it/2 is never a pole");
    lg.im - 0.5 * t * PI.ln()
}

/// `ln(t / 2π)` as a double-double; exact up to the error of `ln` on `[1, 2)`.
fn ln_over_2pi_dd(t: f64) -> DoubleDouble {
    let mut e = t.log2().floor() as i32;
    let mut m = t / 2f64.powi(e);
    if m >= 2.0 {
        m /= 2.0;
        e += 1;
    } else if m < 1.0 {
        m *= 2.0;
        e -= 1;
    }
    LN2_DD.mul_f64(e as f64).add_f64(m.ln()).sub(LN_2PI_DD)
}

fn theta_asymptotic_dd(t: f64) -> DoubleDouble {
    let lead = ln_over_2pi_dd(t).add_f64(-1.0).mul_f64(0.5 * t);
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let tail = inv
        * (1.0 / 48.0
            + inv2 * (7.0 / 5760.0 + inv2 * (31.0 / 80640.0 + inv2 * (127.0 / 430080.0 + inv2 * (511.0 / 1216512.0)))));
    lead.sub(PI_DD.mul_f64(0.125)).add_f64(tail)
}

/// θ′(t) = ½ Re ψ(1/4 + it/2) − ½ ln π, for `t > 1`.
pub fn theta_deriv(t: f64) -> Result<f64> {
    if !t.is_finite() || t <= 1.0 {
        return Err(Error::domain(format!("theta_deriv requires t > 1, got {t}")));
    }
    if t <= THETA_SWITCH {
        let psi = digamma(Complex64::new(0.25, 0.5 * t))?;
        return Ok(0.5 * psi.re - 0.5 * PI.ln());
    }
    let inv2 = 1.0 / (t * t);
    let tail = inv2 * (1.0 / 48.0 + inv2 * (7.0 / 1920.0 + inv2 * (31.0 / 16128.0)));
    Ok(0.5 * (t / (2.0 * PI)).ln() - tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_at_zero_is_zero() {
        assert_eq!(theta(0.0).unwrap(), 0.0);
    }

    #[test]
    fn theta_rejects_negative() {
        assert!(theta(-1.0).is_err());
        assert!(theta(f64::NAN).is_err());
    }

    #[test]
    fn theta_reference_values() {
        // mpmath.siegeltheta
        let cases = [
            (1.0, -1.767_547_952_812_290_4),
            (2.0 * PI, -3.530_971_066_598_538),
            (30.0, 8.057_800_136_563_99),
            (100.0, 87.972_165_231_787_22),
        ];
        for (t, want) in cases {
            let got = theta(t).unwrap();
            assert!((got - want).abs() < 1e-12, "theta({t}) = {got}, want {want}");
        }
    }

    #[test]
    fn theta_large_t_in_double_double() {
        // mpmath siegeltheta split into hi + lo
        let cases = [
            (1e5, DoubleDouble::new(433_752.027_229_170_8, 8.067_250_293_707_878e-13)),
            (1e6, DoubleDouble::new(5_488_816.353_078_403_5, -6.527_047_045_525_348e-11)),
        ];
        for (t, want) in cases {
            let err = theta_dd(t).unwrap().sub(want).to_f64();
            assert!(err.abs() < 1e-11 * t.log10(), "t = {t}: residual {err}");
        }
    }

    #[test]
    fn theta_vanishes_at_first_gram_point() {
        assert!(theta(17.845_599_540_5).unwrap().abs() < 1e-9);
    }

    #[test]
    fn switchover_overlap_agrees() {
        for i in 0..=40 {
            let t = 30.0 + 0.25 * i as f64;
            let a = theta_from_log_gamma(t);
            let b = theta_asymptotic_dd(t).to_f64();
            assert!((a - b).abs() <= 1e-10, "t = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn theta_deriv_examples() {
        assert!(theta_deriv(2.0 * PI).unwrap().abs() <= 1e-3);
        assert!((theta_deriv(2.0 * PI * std::f64::consts::E).unwrap() - 0.5).abs() < 1e-3);
        // mpmath diff of siegeltheta
        assert!((theta_deriv(100.0).unwrap() - 1.383_644_476_419_579_4).abs() < 1e-12);
        assert!((theta_deriv(5.0).unwrap() + 0.115_059_109_122_798_87).abs() < 1e-12);
        assert!(theta_deriv(1.0).is_err());
    }

    #[test]
    fn theta_deriv_matches_central_difference() {
        for t in [12.0, 29.0, 31.0, 100.0, 1234.5] {
            let h = 1e-4;
            let fd = (theta(t + h).unwrap() - theta(t - h).unwrap()) / (2.0 * h);
            assert!((theta_deriv(t).unwrap() - fd).abs() <= 1e-6, "t = {t}");
        }
    }

    #[test]
    fn theta_is_strictly_increasing_above_ten() {
        let mut prev = theta(10.0).unwrap();
        let mut t = 10.0;
        while t < 2000.0 {
            t += 0.731;
            let cur = theta(t).unwrap();
            assert!(cur > prev);
            prev = cur;
        }
    }
}
