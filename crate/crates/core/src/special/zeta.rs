//! ζ(s) by Euler–Maclaurin summation.
//!
//! This is the slow, general evaluator. It serves as the reference for the
//! Riemann–Siegel path and as the only route below `t = 10`.

use num_complex::Complex64;

use super::gamma::bernoulli_over_factorial;
use super::EvalConfig;
use crate::sum::{CompensatedSum, ComplexSum};
use crate::{Error, Result};

fn cutoff(s: Complex64, terms: usize) -> usize {
    let n = s.norm() + 2.0 * terms as f64 + 1.0;
    (n.ceil() as usize).max(10)
}

/// ζ(s) for `s ≠ 1` with `cfg.em_terms` Bernoulli corrections.
///
/// The truncation point starts at `N ≈ |s| + 2·em_terms` and is doubled
/// until the last correction term falls below `cfg.abs_tol`.
pub fn zeta_euler_maclaurin(s: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::domain(format!("zeta of non-finite argument {s}")));
    }
    if s.re == 1.0 && s.im == 0.0 {
        return Err(Error::Pole { re: 1.0, im: 0.0 });
    }
    let terms = cfg.em_terms.max(1);
    let mut n = cutoff(s, terms);
    for _ in 0..8 {
        let (value, last) = euler_maclaurin_at(s, n, terms);
        if last <= cfg.abs_tol {
            return Ok(value);
        }
        n *= 2;
    }
    Ok(euler_maclaurin_at(s, n, terms).0)
}

/// Returns the sum and the magnitude of the last Bernoulli correction.
fn euler_maclaurin_at(s: Complex64, n: usize, terms: usize) -> (Complex64, f64) {
    let mut acc = ComplexSum::new();
    for k in 1..n {
        acc.add((-s * (k as f64).ln()).exp());
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp();
    acc.add(n_pow * nf / (s - 1.0));
    acc.add(n_pow * 0.5);

    // s(s+1)...(s+2k-2) N^{-s-2k+1}
    let mut rising = s;
    let mut power = n_pow / nf;
    let mut last = 0.0;
    for k in 1..=terms {
        let term = rising * power * bernoulli_over_factorial(k);
        acc.add(term);
        last = term.norm();
        let kk = 2.0 * k as f64;
        rising = rising * (s + (kk - 1.0)) * (s + kk);
        power /= nf * nf;
    }
    (acc.value(), last)
}

/// `ζ(x) − 1/(x−1)` for real `x ≠ 1` near the pole, without cancellation.
pub(crate) fn zeta_regular_part(x: f64, cfg: &EvalConfig) -> f64 {
    let terms = cfg.em_terms.max(1);
    let n = 64usize.max(2 * terms + 8);
    let nf = n as f64;
    let ln_n = nf.ln();
    let mut acc = CompensatedSum::new();
    for k in 1..n {
        acc.add((k as f64).powf(-x));
    }
    let h = x - 1.0;
    // (N^{1-x} - 1)/(x - 1)
    acc.add(if h == 0.0 { -ln_n } else { (-h * ln_n).exp_m1() / h });
    let n_pow = nf.powf(-x);
    acc.add(0.5 * n_pow);
    let mut rising = x;
    let mut power = n_pow / nf;
    for k in 1..=terms {
        acc.add(rising * power * bernoulli_over_factorial(k));
        let kk = 2.0 * k as f64;
        rising *= (x + kk - 1.0) * (x + kk);
        power /= nf * nf;
    }
    acc.value()
}
