//! Complex log-Gamma and digamma via shifted Stirling series.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::sum::ComplexSum;
use crate::{Error, Result};

/// Number of Bernoulli terms in the Stirling series.
const STIRLING_TERMS: usize = 12;
/// Arguments are shifted upward until `|z|` reaches this radius.
const STIRLING_RADIUS: f64 = 12.0;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k)!` for `k = 1..=40`, from `B_{2k}/(2k)! = (-1)^{k+1} 2 ζ(2k) / (2π)^{2k}`.
pub(crate) fn bernoulli_over_factorial(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| (1..=40).map(bernoulli_ratio_uncached).collect());
    table[k - 1]
}

fn bernoulli_ratio_uncached(k: usize) -> f64 {
    let two_k = 2 * k as i32;
    let zeta = even_zeta(two_k);
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * 2.0 * zeta / (2.0 * PI).powi(two_k)
}

/// ζ(m) for even m ≥ 2 by direct summation with an Euler–Maclaurin tail.
fn even_zeta(m: i32) -> f64 {
    if m == 2 {
        return PI * PI / 6.0;
    }
    const N: i32 = 64;
    let mut acc: crate::sum::CompensatedSum = (1..N).map(|n| (n as f64).powi(-m)).collect();
    let nf = N as f64;
    let mf = m as f64;
    acc.add(nf.powf(1.0 - mf) / (mf - 1.0));
    acc.add(0.5 * nf.powi(-m));
    acc.add(mf / 12.0 * nf.powi(-m - 1));
    acc.add(-mf * (mf + 1.0) * (mf + 2.0) / 720.0 * nf.powi(-m - 3));
    acc.add(mf * (mf + 1.0) * (mf + 2.0) * (mf + 3.0) * (mf + 4.0) / 30240.0 * nf.powi(-m - 5));
    acc.value()
}

/// `B_{2k}` as a float (for the Stirling coefficients).
fn bernoulli(k: usize) -> f64 {
    let mut fact = 1.0;
    for i in 1..=(2 * k) {
        fact *= i as f64;
    }
    bernoulli_over_factorial(k) * fact
}

fn stirling_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        (1..=STIRLING_TERMS)
            .map(|k| {
                let kf = k as f64;
                bernoulli(k) / (2.0 * kf * (2.0 * kf - 1.0))
            })
            .collect()
    })
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Principal-branch logarithm of `sin(w)` that stays finite for large `|Im w|`.
pub(crate) fn ln_sin(w: Complex64) -> Complex64 {
    if w.im.abs() < 20.0 {
        return w.sin().ln();
    }
    if w.im < 0.0 {
        return ln_sin(w.conj()).conj();
    }
    // sin w = (i/2) e^{-iw} (1 - e^{2iw}) with |e^{2iw}| = e^{-2 Im w} tiny
    let i = Complex64::i();
    let e2 = (2.0 * i * w).exp();
    -i * w + Complex64::new((0.5f64).ln(), PI / 2.0) + (Complex64::new(1.0, 0.0) - e2).ln()
}

/// `ln Γ(z)`, continuous in `z` off the negative real axis.
///
/// For `Re z ≥ 1/2` this is the principal (continuous) branch; for
/// `Re z < 1/2` the value comes from the reflection formula and is correct
/// modulo `2πi`, i.e. `exp(log_gamma(z)) = Γ(z)`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain(format!("log_gamma of non-finite argument {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::domain(format!("Gamma has a pole at {}", z.re)));
    }
    if z.re < 0.5 {
        let one = Complex64::new(1.0, 0.0);
        let reflected = log_gamma_right(one - z);
        return Ok(Complex64::new(PI.ln(), 0.0) - ln_sin(PI * z) - reflected);
    }
    Ok(log_gamma_right(z))
}

fn log_gamma_right(z: Complex64) -> Complex64 {
    let mut w = z;
    let mut shift = ComplexSum::new();
    while w.norm() < STIRLING_RADIUS {
        shift.add(w.ln());
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = ComplexSum::new();
    let mut pow = inv;
    for c in stirling_coefficients() {
        series.add(pow * *c);
        pow *= inv2;
    }
    let mut acc = ComplexSum::new();
    acc.add((w - 0.5) * w.ln());
    acc.add(-w);
    acc.add(Complex64::new(HALF_LN_2PI, 0.0));
    acc.merge(&series);
    acc.value() - shift.value()
}

/// Digamma `ψ(z) = Γ'(z)/Γ(z)`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::domain(format!("digamma has a pole at {}", z.re)));
    }
    if z.re < 0.5 {
        let one = Complex64::new(1.0, 0.0);
        let cot = (PI * z).cos() / (PI * z).sin();
        return Ok(digamma_right(one - z) - PI * cot);
    }
    Ok(digamma_right(z))
}

fn digamma_right(z: Complex64) -> Complex64 {
    let mut w = z;
    let mut shift = ComplexSum::new();
    while w.norm() < STIRLING_RADIUS {
        shift.add(w.inv());
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut acc = ComplexSum::new();
    acc.add(w.ln());
    acc.add(-0.5 * inv);
    let mut pow = inv2;
    for k in 1..=STIRLING_TERMS {
        acc.add(-pow * (bernoulli(k) / (2.0 * k as f64)));
        pow *= inv2;
    }
    acc.value() - shift.value()
}
