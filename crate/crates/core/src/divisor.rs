//! Generalized divisor functions `d_κ(n)`, truncated convolution powers of
//! their Dirichlet polynomials, and the moment polynomials `P₂`, `P₃`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::special::{zeta_regular_part, EvalConfig};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Largest coefficient array [`convolve_truncated`] will allocate.
pub const INDEX_BUDGET: u64 = 100_000_000;

/// `d_κ(p^j) = Γ(κ+j)/(Γ(κ) j!) = Π_{i<j} (κ+i)/(i+1)`.
pub fn prime_power_weight(kappa: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (kappa + i as f64) / (i as f64 + 1.0))
}

/// `d_κ(n)` by trial-division factorization.
pub fn d_kappa(n: u64, kappa: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("d_kappa is defined for n >= 1"));
    }
    let mut rest = n;
    let mut value = 1.0;
    let mut p = 2u64;
    while p * p <= rest {
        let mut j = 0;
        while rest % p == 0 {
            rest /= p;
            j += 1;
        }
        if j > 0 {
            value *= prime_power_weight(kappa, j);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        value *= kappa;
    }
    Ok(value)
}

/// Smallest-prime-factor decomposition of `1..=limit`.
///
/// For each `n ≥ 2`, `n = p^e · rest[n]` with `p` the smallest prime factor
/// and `gcd(p, rest[n]) = 1`.
pub struct Factorization {
    exponent: Vec<u8>,
    rest: Vec<u32>,
}

impl Factorization {
    pub fn new(limit: usize) -> Result<Self> {
        if limit as u64 >= u32::MAX as u64 {
            return Err(Error::SizeLimit { requested: limit as u128, budget: u32::MAX as u64 });
        }
        let mut spf = vec![0u32; limit + 1];
        let mut primes: Vec<u32> = Vec::new();
        let mut exponent = vec![0u8; limit + 1];
        let mut rest = vec![1u32; limit + 1];
        for n in 2..=limit {
            if spf[n] == 0 {
                spf[n] = n as u32;
                primes.push(n as u32);
                exponent[n] = 1;
                rest[n] = 1;
            }
            let sp = spf[n];
            for &p in &primes {
                let m = n * p as usize;
                if p > sp || m > limit {
                    break;
                }
                spf[m] = p;
                if p == sp {
                    exponent[m] = exponent[n] + 1;
                    rest[m] = rest[n];
                } else {
                    exponent[m] = 1;
                    rest[m] = n as u32;
                }
            }
        }
        Ok(Self { exponent, rest })
    }

    pub fn limit(&self) -> usize {
        self.exponent.len() - 1
    }

    /// `d_κ(n)` for `n = 0..=limit`, with the unused slot 0 set to zero.
    pub fn divisor_values(&self, kappa: f64) -> Vec<f64> {
        let limit = self.limit();
        let max_exp = self.exponent.iter().copied().max().unwrap_or(0) as u32;
        let weights: Vec<f64> = (0..=max_exp).map(|j| prime_power_weight(kappa, j)).collect();
        let mut values = vec![0.0; limit + 1];
        if limit >= 1 {
            values[1] = 1.0;
        }
        for n in 2..=limit {
            values[n] = values[self.rest[n] as usize] * weights[self.exponent[n] as usize];
        }
        values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorTable {
    pub kappa: f64,
    pub limit: usize,
    /// `values[n] = d_κ(n)`; `values[0]` is unused and zero.
    pub values: Vec<f64>,
}

impl DivisorTable {
    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }
}

/// `d_κ(1..=limit)` by a linear sieve.
pub fn build_table(kappa: f64, limit: usize) -> Result<DivisorTable> {
    check_kappa(kappa)?;
    if limit < 1 {
        return Err(Error::domain("divisor table needs limit >= 1"));
    }
    let fac = Factorization::new(limit)?;
    Ok(DivisorTable { kappa, limit, values: fac.divisor_values(kappa) })
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::domain(format!("kappa must be positive, got {kappa}")));
    }
    Ok(())
}

/// Coefficients of `(Σ_{n≤ξ} d_κ(n) n^{−s})^m`, i.e. `d_{κm}(n; ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedCoeffs {
    pub kappa: f64,
    pub m: u32,
    pub xi: f64,
    /// `values[n]` for `n = 0..=⌊ξ⌋^m`; `values[0]` is zero.
    pub values: Vec<f64>,
}

impl TruncatedCoeffs {
    pub fn limit(&self) -> usize {
        self.values.len() - 1
    }

    /// Checks `values[n] = d_{κm}(n)` for `n ≤ ξ` and `0 ≤ values[n] ≤ d_{κm}(n)`
    /// everywhere, returning the largest violation.
    pub fn invariant_defect(&self) -> Result<f64> {
        let full = build_table(self.kappa * self.m.max(1) as f64, self.limit().max(1))?;
        let head = self.xi.floor() as usize;
        let mut worst = 0.0f64;
        for n in 1..=self.limit() {
            let v = self.values[n];
            let d = if self.m == 0 {
                if n == 1 {
                    1.0
                } else {
                    0.0
                }
            } else {
                full.values[n]
            };
            let tol = 1e-12 * d.max(1.0);
            if v < -tol {
                worst = worst.max(-v);
            }
            if v > d + tol {
                worst = worst.max(v - d);
            }
            if n <= head && (v - d).abs() > tol {
                worst = worst.max((v - d).abs());
            }
        }
        Ok(worst)
    }
}

/// `⌊ξ⌋`, robust against `ξ` landing one ulp below an integer.
pub fn truncation_index(xi: f64) -> usize {
    (xi * (1.0 + 1e-12)).floor() as usize
}

/// The `m`-th Dirichlet convolution power of `(d_κ(n))_{n ≤ ξ}`.
pub fn convolve_truncated(kappa: f64, m: u32, xi: f64) -> Result<TruncatedCoeffs> {
    check_kappa(kappa)?;
    if !(xi >= 1.0 && xi.is_finite()) {
        return Err(Error::domain(format!("xi must be at least 1, got {xi}")));
    }
    let base_len = truncation_index(xi);
    let requested = (base_len as u128).checked_pow(m).unwrap_or(u128::MAX);
    if requested > INDEX_BUDGET as u128 {
        return Err(Error::SizeLimit { requested, budget: INDEX_BUDGET });
    }
    let limit = requested as usize;
    let base = build_table(kappa, base_len)?.values;
    let mut values = vec![0.0; limit + 1];
    values[1] = 1.0;
    let mut current_limit = 1usize;
    for _ in 0..m {
        let next_limit = current_limit * base_len;
        let mut next = vec![0.0; limit + 1];
        for i in 1..=current_limit {
            let a = values[i];
            if a == 0.0 {
                continue;
            }
            for (j, &b) in base.iter().enumerate().skip(1) {
                next[i * j] += a * b;
            }
        }
        values = next;
        current_limit = next_limit;
    }
    Ok(TruncatedCoeffs { kappa, m, xi, values })
}

/// `Σ_{n≤x} d_λ(n)` with its main term when one is available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialSum {
    pub lambda: u32,
    pub x: f64,
    pub sum: f64,
    /// `x P_{λ−1}(ln x)`; only implemented for `λ = 3`.
    pub prediction: Option<f64>,
}

impl PartialSum {
    pub fn rel_error(&self) -> Option<f64> {
        self.prediction.map(|p| (self.sum - p).abs() / self.sum.abs())
    }
}

/// The residue main term `x P_{λ−1}(ln x)` of `Σ_{n≤x} d_λ(n)`.
pub fn divisor_prediction(lambda: u32, x: f64) -> Result<f64> {
    match lambda {
        3 => Ok(x * p2_polynomial()?.eval(x.ln())),
        _ => Err(Error::Unsupported(format!("main term for lambda = {lambda}"))),
    }
}

pub fn divisor_partial_sum(lambda: u32, x: f64) -> Result<PartialSum> {
    if lambda < 2 {
        return Err(Error::domain(format!("lambda must be at least 2, got {lambda}")));
    }
    if !(x >= 2.0 && x.is_finite()) {
        return Err(Error::domain(format!("x must be at least 2, got {x}")));
    }
    let table = build_table(lambda as f64, x.floor() as usize)?;
    let sum: CompensatedSum = table.values[1..].iter().copied().collect();
    let prediction = match divisor_prediction(lambda, x) {
        Ok(p) => Some(p),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(PartialSum { lambda, x, sum: sum.value(), prediction })
}

/// `Σ_{n≤x} d_λ(n) d_μ(n) / n`.
pub fn divisor_ratio_sum(lambda: f64, mu: f64, x: f64) -> Result<f64> {
    Ok(divisor_ratio_sums(lambda, mu, &[x])?[0])
}

/// [`divisor_ratio_sum`] at several cut-offs from one sieve.
pub fn divisor_ratio_sums(lambda: f64, mu: f64, xs: &[f64]) -> Result<Vec<f64>> {
    check_kappa(lambda)?;
    check_kappa(mu)?;
    if xs.iter().any(|&x| !(x >= 2.0 && x.is_finite())) {
        return Err(Error::domain("every cut-off must be at least 2"));
    }
    let Some(limit) = xs.iter().map(|&x| x.floor() as usize).max() else {
        return Ok(Vec::new());
    };
    let fac = Factorization::new(limit)?;
    let a = fac.divisor_values(lambda);
    let b = if mu == lambda { None } else { Some(fac.divisor_values(mu)) };
    let b = b.as_ref().unwrap_or(&a);
    let mut cuts: Vec<(usize, usize)> = xs.iter().enumerate().map(|(i, &x)| (x.floor() as usize, i)).collect();
    cuts.sort_unstable();
    let mut out = vec![0.0; xs.len()];
    let mut acc = CompensatedSum::new();
    let mut next = 1usize;
    for (cut, idx) in cuts {
        while next <= cut {
            acc.add(a[next] * b[next] / next as f64);
            next += 1;
        }
        out[idx] = acc.value();
    }
    Ok(out)
}

/// Least-squares slope of `ln S(x)` against `ln ln x`.
pub fn ratio_sum_exponent(lambda: f64, mu: f64, xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::domain("regression needs at least two cut-offs"));
    }
    let sums = divisor_ratio_sums(lambda, mu, xs)?;
    let pts: Vec<(f64, f64)> = xs.iter().zip(&sums).map(|(&x, &s)| (x.ln().ln(), s.ln())).collect();
    Ok(least_squares_slope(&pts))
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Euler's constant and the first Stieltjes constant, in the convention
/// `ζ(s) = 1/(s−1) + γ − γ₁(s−1) + …` (so `γ₁ ≈ −0.0728`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stieltjes {
    pub gamma: f64,
    pub gamma1: f64,
}

/// Agreement required between the two independent evaluations.
pub const STIELTJES_TOL: f64 = 1e-10;

/// Computed once per process and validated against a Laurent fit of ζ
/// around `s = 1`; disagreement beyond [`STIELTJES_TOL`] is a configuration
/// error.
pub fn stieltjes() -> Result<Stieltjes> {
    static CELL: OnceLock<std::result::Result<Stieltjes, String>> = OnceLock::new();
    CELL.get_or_init(compute_stieltjes).clone().map_err(Error::Config)
}

fn compute_stieltjes() -> std::result::Result<Stieltjes, String> {
    let limit = stieltjes_limits(1_000_000);
    let laurent = stieltjes_laurent();
    let dg = (limit.gamma - laurent.gamma).abs();
    let dg1 = (limit.gamma1 - laurent.gamma1).abs();
    if dg > STIELTJES_TOL || dg1 > STIELTJES_TOL {
        return Err(format!(
            "Stieltjes constants disagree: gamma {} vs {}, gamma1 {} vs {}",
            limit.gamma, laurent.gamma, limit.gamma1, laurent.gamma1
        ));
    }
    Ok(limit)
}

/// The limit definitions at `N`, with Euler–Maclaurin tail corrections.
pub fn stieltjes_limits(n: usize) -> Stieltjes {
    let mut h = CompensatedSum::new();
    let mut l = CompensatedSum::new();
    for k in 1..=n {
        let kf = k as f64;
        h.add(1.0 / kf);
        l.add(kf.ln() / kf);
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n2 = nf * nf;
    let gamma =
        h.value() - ln_n - 0.5 / nf + 1.0 / (12.0 * n2) - 1.0 / (120.0 * n2 * n2) + 1.0 / (252.0 * n2 * n2 * n2);

    // derivatives of f(x) = ln x / x: f^(m) = (−1)^m m! x^{−m−1} (ln x − H_m)
    let deriv = |m: u32| {
        let fact: f64 = (1..=m).map(|i| i as f64).product();
        let harmonic: f64 = (1..=m).map(|i| 1.0 / i as f64).sum();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sign * fact * nf.powi(-(m as i32) - 1) * (ln_n - harmonic)
    };
    let gamma1 =
        l.value() - 0.5 * ln_n * ln_n - 0.5 * ln_n / nf - deriv(1) / 12.0 + deriv(3) / 720.0 - deriv(5) / 30240.0;
    Stieltjes { gamma, gamma1 }
}

/// Richardson-extrapolated symmetric differences of `ζ(1+h) − 1/h`.
pub fn stieltjes_laurent() -> Stieltjes {
    let cfg = EvalConfig { em_terms: 20, ..EvalConfig::default() };
    let r = |h: f64| zeta_regular_part(1.0 + h, &cfg);
    let hs = [0.2, 0.1, 0.05];
    let even: Vec<f64> = hs.iter().map(|&h| 0.5 * (r(h) + r(-h))).collect();
    let odd: Vec<f64> = hs.iter().map(|&h| (r(h) - r(-h)) / (2.0 * h)).collect();
    Stieltjes { gamma: richardson_h2(&even), gamma1: -richardson_h2(&odd) }
}

/// Extrapolates values at `h, h/2, h/4` with error series in `h², h⁴`.
fn richardson_h2(v: &[f64]) -> f64 {
    let a1 = (4.0 * v[1] - v[0]) / 3.0;
    let a2 = (4.0 * v[2] - v[1]) / 3.0;
    (16.0 * a2 - a1) / 15.0
}

/// A real polynomial, constant term first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentPolynomial {
    pub coefficients: Vec<f64>,
}

impl MomentPolynomial {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    pub fn derivative(&self) -> MomentPolynomial {
        let coefficients = self.coefficients.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect();
        MomentPolynomial { coefficients }
    }

    /// Coefficient of `u^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coefficients.get(k).copied().unwrap_or(0.0)
    }
}

/// `P₂(u) = A₂u² + A₁u + A₀`, the main-term polynomial of `Σ_{n≤x} d₃(n)`.
///
/// `A₂ = 1/2`, `A₁ = 3γ − 1`, `A₀ = 1 + 3(γ² − γ − γ₁)`, where `γ₁` is the
/// Stieltjes constant of [`stieltjes`].
pub fn p2_polynomial() -> Result<MomentPolynomial> {
    let Stieltjes { gamma, gamma1 } = stieltjes()?;
    let a1 = -gamma1;
    Ok(MomentPolynomial::new(vec![1.0 + 3.0 * (gamma * gamma - gamma + a1), 3.0 * gamma - 1.0, 0.5]))
}

/// `P₃(u) = uP₂(u) − P₂(u) + P₂′(u) − P₂″(u)`.
pub fn p3_polynomial() -> Result<MomentPolynomial> {
    let Stieltjes { gamma, gamma1 } = stieltjes()?;
    let a1 = -gamma1;
    let b1 = 3.0 * (a1 + (1.0 - gamma) * (1.0 - gamma));
    Ok(MomentPolynomial::new(vec![-b1, b1, 3.0 * gamma - 1.5, 0.5]))
}

/// Largest coefficient mismatch in `P₃ = uP₂ − P₂ + P₂′ − P₂″`.
pub fn p3_identity_defect(p2: &MomentPolynomial, p3: &MomentPolynomial) -> f64 {
    let d1 = p2.derivative();
    let d2 = d1.derivative();
    (0..=3)
        .map(|k| {
            let shifted = if k == 0 { 0.0 } else { p2.coeff(k - 1) };
            let rhs = shifted - p2.coeff(k) + d1.coeff(k) - d2.coeff(k);
            (p3.coeff(k) - rhs).abs()
        })
        .fold(0.0, f64::max)
}
