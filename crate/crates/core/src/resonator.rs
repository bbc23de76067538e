//! The resonator `x_n = √n f(n)`, with `f` multiplicative, supported on
//! squarefree products of primes in `[L², exp((ln L)²)]` and
//! `f(p) = L/(√p ln p)`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grampoints::Angle;
use crate::moments::{
    max_scan, s1_over_points, s2_over_points, CriticalSet, DirichletPolynomial, MomentKind, MomentReport,
};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Relative slack allowed in the certificate inequality.
pub const CERTIFICATE_SLACK: f64 = 1e-9;

/// Default `ε` in the admissible length `X ≤ T^{1/4−ε}`.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Smallest `X` accepted by [`build_resonator`].
pub const MIN_X: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorConfig {
    pub x: f64,
    pub l: f64,
    pub prime_lo: f64,
    pub prime_hi: f64,
}

impl ResonatorConfig {
    pub fn new(x: f64) -> Result<Self> {
        if !(x.is_finite() && x > 1.0) || x.ln().ln() <= 1.0 {
            return Err(Error::Config(format!("resonator length X = {x} needs ln ln X > 1")));
        }
        let (ln_x, lnln_x) = (x.ln(), x.ln().ln());
        let ln_l = (ln_x * lnln_x).sqrt();
        let cfg = Self { x, l: ln_l.exp(), prime_lo: (2.0 * ln_l).exp(), prime_hi: (ln_l * ln_l).exp() };
        if cfg.prime_lo >= cfg.prime_hi {
            return Err(Error::Config(format!(
                "empty resonance interval [{}, {}] for X = {x}",
                cfg.prime_lo, cfg.prime_hi
            )));
        }
        Ok(cfg)
    }

    /// Upper end of the primes that can actually occur, `min(exp((ln L)²), X)`.
    pub fn effective_hi(&self) -> f64 {
        self.prime_hi.min(self.x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resonator {
    /// `None` for the degenerate resonator `f = 1_{n=1}`.
    pub config: Option<ResonatorConfig>,
    /// `(n, f(n))` for every `n` with `f(n) ≠ 0`, increasing in `n`.
    pub support: Vec<(u64, f64)>,
    /// Prime factors of each support element, parallel to `support`.
    factors: Vec<Vec<u64>>,
}

impl Resonator {
    /// `f(1) = 1` and `f(n) = 0` otherwise.
    pub fn degenerate() -> Self {
        Self { config: None, support: vec![(1, 1.0)], factors: vec![Vec::new()] }
    }

    /// Rebuilds a resonator from `(n, f(n))` pairs, e.g. a loaded dump.
    pub fn from_support(config: Option<ResonatorConfig>, mut support: Vec<(u64, f64)>) -> Result<Self> {
        support.sort_unstable_by_key(|e| e.0);
        if support.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::domain("duplicate index in resonator support"));
        }
        let factors = support
            .iter()
            .map(|&(n, f)| {
                if n == 0 || !f.is_finite() {
                    return Err(Error::domain(format!("invalid resonator entry ({n}, {f})")));
                }
                squarefree_factors(n).ok_or_else(|| Error::domain(format!("{n} is not squarefree")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { config, support, factors })
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn x(&self) -> f64 {
        self.config.map(|c| c.x).unwrap_or(1.0)
    }

    pub fn f(&self, n: u64) -> f64 {
        match self.support.binary_search_by_key(&n, |e| e.0) {
            Ok(i) => self.support[i].1,
            Err(_) => 0.0,
        }
    }

    /// `Σ f(n)²`.
    pub fn sum_f_squared(&self) -> f64 {
        let s: CompensatedSum = self.support.iter().map(|e| e.1 * e.1).collect();
        s.value()
    }

    /// `𝒳₀ = max √n f(n)`.
    pub fn x0(&self) -> f64 {
        self.support.iter().map(|&(n, f)| (n as f64).sqrt() * f).fold(0.0, f64::max)
    }

    /// `X(s) = Σ √n f(n) n^{−s}` as a dense polynomial.
    pub fn polynomial(&self) -> Result<DirichletPolynomial> {
        let len = self.support.last().map(|e| e.0).unwrap_or(1) as usize;
        let mut c = vec![Complex64::new(0.0, 0.0); len + 1];
        for &(n, f) in &self.support {
            c[n as usize] = Complex64::new((n as f64).sqrt() * f, 0.0);
        }
        DirichletPolynomial::new(c)
    }

    /// Checks that every support element is a squarefree product of primes
    /// inside the resonance interval and not above `X`.
    pub fn support_violations(&self) -> usize {
        let Some(cfg) = self.config else {
            return usize::from(self.support != [(1, 1.0)]);
        };
        self.support
            .iter()
            .zip(&self.factors)
            .filter(|((n, _), ps)| {
                *n as f64 > cfg.x
                    || ps.iter().any(|&p| (p as f64) < cfg.prime_lo || p as f64 > cfg.prime_hi)
                    || ps.iter().product::<u64>() != *n
            })
            .count()
    }
}

fn squarefree_factors(mut n: u64) -> Option<Vec<u64>> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return None;
            }
            out.push(p);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    Some(out)
}

/// Primes in `[lo, hi]` by a segmented sieve.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = (hi as f64).sqrt() as u64 + 1;
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            base.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                small[j] = false;
                j += i;
            }
        }
    }
    let mut out = Vec::new();
    const SEGMENT: u64 = 1 << 16;
    let mut start = lo;
    while start <= hi {
        let end = (start + SEGMENT - 1).min(hi);
        let mut mark = vec![true; (end - start + 1) as usize];
        for &p in &base {
            if p * p > end {
                break;
            }
            let first = (p * p).max(start.div_ceil(p) * p);
            let mut m = first;
            while m <= end {
                mark[(m - start) as usize] = false;
                m += p;
            }
        }
        out.extend(mark.iter().enumerate().filter(|(_, &ok)| ok).map(|(i, _)| start + i as u64));
        start = end + 1;
    }
    out
}

/// Enumerates every squarefree product of resonance primes up to `X`.
///
/// Fails when the theoretical interval `[L², exp((ln L)²)]` holds no prime.
/// If only the effective interval `[L², X]` is empty, the result is the
/// degenerate support `{1}` carrying this configuration.
pub fn build_resonator(x: f64) -> Result<Resonator> {
    if !(x >= MIN_X) {
        return Err(Error::domain(format!("resonator length must be at least {MIN_X}, got {x}")));
    }
    let cfg = ResonatorConfig::new(x)?;
    let lo = cfg.prime_lo.ceil() as u64;
    let theoretical_hi = cfg.prime_hi.min(u64::MAX as f64 / 2.0).floor() as u64;
    let hi = cfg.effective_hi().floor() as u64;
    let primes = primes_in(lo, hi);
    if primes.is_empty() && next_prime_at_least(lo).is_none_or(|p| p > theoretical_hi) {
        return Err(Error::Config(format!("no primes in the resonance interval [{}, {}]", cfg.prime_lo, cfg.prime_hi)));
    }
    let weights: Vec<f64> = primes.iter().map(|&p| cfg.l / ((p as f64).sqrt() * (p as f64).ln())).collect();

    let mut entries: Vec<(u64, f64, Vec<u64>)> = vec![(1, 1.0, Vec::new())];
    let x_int = x.floor() as u64;
    let mut stack: Vec<(usize, u64, f64, Vec<u64>)> = vec![(0, 1, 1.0, Vec::new())];
    while let Some((start, n, f, ps)) = stack.pop() {
        for i in start..primes.len() {
            let p = primes[i];
            let Some(m) = n.checked_mul(p).filter(|&m| m <= x_int) else {
                break;
            };
            let mut qs = ps.clone();
            qs.push(p);
            let g = f * weights[i];
            entries.push((m, g, qs.clone()));
            stack.push((i + 1, m, g, qs));
        }
    }
    entries.sort_unstable_by_key(|e| e.0);
    let (support, factors) = entries.into_iter().map(|(n, f, ps)| ((n, f), ps)).unzip();
    Ok(Resonator { config: Some(cfg), support, factors })
}

fn next_prime_at_least(lo: u64) -> Option<u64> {
    (lo..lo.saturating_add(10_000)).find(|&n| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorRatio {
    /// `Σ_{mn≤X} f(m) f(mn) / √n`.
    pub numerator: f64,
    /// `Σ f(n)²`.
    pub denominator: f64,
    pub ratio: f64,
}

/// Exact numerator and denominator of the resonance quotient.
///
/// The support is closed under taking divisors, so for each `k = mn` in the
/// support the admissible `m` are exactly the sub-products of its primes.
pub fn resonator_ratio(res: &Resonator) -> Result<ResonatorRatio> {
    let denominator = res.sum_f_squared();
    if denominator <= 0.0 {
        return Err(Error::DegenerateResonator("sum of f(n)^2 vanishes".into()));
    }
    let mut num = CompensatedSum::new();
    for (&(k, fk), ps) in res.support.iter().zip(&res.factors) {
        let r = ps.len();
        for mask in 0u32..(1u32 << r) {
            let m: u64 = (0..r).filter(|&i| mask & (1 << i) != 0).map(|i| ps[i]).product();
            let n = k / m;
            num.add(res.f(m) * fk / (n as f64).sqrt());
        }
    }
    let numerator = num.value();
    Ok(ResonatorRatio { numerator, denominator, ratio: numerator / denominator })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub x: f64,
    pub s1: MomentReport,
    pub s2: MomentReport,
    /// `|S₁| / S₂`.
    pub bound: f64,
    /// `max |ζ(1/2+it_n)|` over the same points.
    pub scanned_max: f64,
    pub holds: bool,
    /// Whether `X ≤ T^{1/4−ε}`.
    pub precondition_ok: bool,
    /// `φ = π/2`, where the predicted factor `1 + e^{−2iφ}` vanishes.
    pub vanishing_direction: bool,
}

/// `|S₁| ≤ S₂ · max|ζ|` with `X = Y` the resonator polynomial.
pub fn certify_lower_bound(set: &CriticalSet, res: &Resonator, epsilon: f64) -> Result<Certificate> {
    let cap = set.t_max.powf(0.25 - epsilon);
    let precondition_ok = res.x() <= cap;
    if !precondition_ok {
        log::warn!("resonator length {} exceeds T^(1/4-eps) = {cap}; certificate computed anyway", res.x());
    }
    let started = Instant::now();
    let poly = res.polynomial()?;
    let s1 = s1_over_points(set, &poly, &poly);
    let s2 = s2_over_points(set, &poly);
    let scale = set.main_scale();
    let ratio = resonator_ratio(res)?;
    let rot = Complex64::from_polar(1.0, -2.0 * set.phi.value());
    let s1_pred = (1.0 + rot) * scale * ratio.numerator;
    let s2_pred = Complex64::from(scale * ratio.denominator);
    let s1 = MomentReport::from_parts(set, MomentKind::S1, 1.0, s1, s1_pred, started);
    let s2 = MomentReport::from_parts(set, MomentKind::S2, 2.0, s2.into(), s2_pred, started);

    let bound = s1.computed.norm() / s2.computed.re;
    let scan = max_scan(set);
    let scanned_max = scan.max_plus.unwrap_or(0.0).max(scan.max_minus.unwrap_or(0.0));
    Ok(Certificate {
        x: res.x(),
        bound,
        scanned_max,
        holds: scanned_max >= bound * (1.0 - CERTIFICATE_SLACK),
        precondition_ok,
        vanishing_direction: is_vanishing_direction(set.phi),
        s1,
        s2,
    })
}

fn is_vanishing_direction(phi: Angle) -> bool {
    (phi.value() - PI / 2.0).abs() < 1e-9
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_ratio_is_one() {
        let r = resonator_ratio(&Resonator::degenerate()).unwrap();
        assert_eq!((r.numerator, r.denominator, r.ratio), (1.0, 1.0, 1.0));
    }

    #[test]
    fn segmented_sieve() {
        assert_eq!(primes_in(1, 30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_in(100_000, 100_100).len(), 6);
        assert_eq!(primes_in(1, 200_000).len(), 17_984);
    }

    #[test]
    fn configuration_checks() {
        assert!(ResonatorConfig::new(10.0).is_err());
        assert!(build_resonator(100.0).is_err());
        let cfg = ResonatorConfig::new(1e4).unwrap();
        assert!(cfg.prime_lo < cfg.prime_hi);
    }

    #[test]
    fn small_build_has_only_unit() {
        let r = build_resonator(1e3).unwrap();
        assert_eq!(r.support, vec![(1, 1.0)]);
        assert_eq!(resonator_ratio(&r).unwrap().ratio, 1.0);
    }

    #[test]
    fn weights_and_support() {
        let r = build_resonator(1e5).unwrap();
        let cfg = r.config.unwrap();
        assert_eq!(r.support_violations(), 0);
        let (p, fp) = r.support[1];
        let approx = 1.0 / (2.0 * cfg.l.ln());
        assert!(((fp - approx) / approx).abs() < 0.1, "f({p}) = {fp}, ~{approx}");
        assert!(r.support.iter().all(|e| e.1 <= 1.0));
        assert!(r.x0() <= cfg.x.sqrt());
        let sq = p * p;
        assert_eq!(r.f(sq), 0.0);
    }

    #[test]
    fn multiplicativity_on_products() {
        let r = build_resonator(1e6).unwrap();
        let composite: Vec<_> = r.support.iter().zip(&r.factors).filter(|(_, ps)| ps.len() == 2).collect();
        for ((n, f), ps) in composite.iter().take(50) {
            assert_eq!(ps[0] * ps[1], *n);
            assert!((f - r.f(ps[0]) * r.f(ps[1])).abs() <= 1e-15);
        }
    }

    #[test]
    fn round_trip_through_support() {
        let r = build_resonator(1e4).unwrap();
        let back = Resonator::from_support(r.config, r.support.clone()).unwrap();
        assert_eq!(back, r);
        assert!(Resonator::from_support(None, vec![(4, 0.1)]).is_err());
    }
}
