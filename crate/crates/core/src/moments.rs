//! Discrete moments of ζ over generalized Gram points and their main terms.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divisor::{convolve_truncated, TruncatedCoeffs};
use crate::grampoints::{classify, enumerate, first_index, solve_gram, Angle, GramPoint, Sign, SignedGramPoint};
use crate::special::{zeta_critical, EvalConfig};
use crate::sum::{par_sum, par_sum_complex, CompensatedSum};
use crate::{Error, Result};

/// Guard used in relative errors against a vanishing prediction.
pub const REL_FLOOR: f64 = 1e-300;

/// Values of `|Z|` below this contribute exactly zero to non-integer powers.
pub const ZERO_GUARD: f64 = 1e-300;

/// A Dirichlet polynomial `Σ_{n≤X} x_n n^{−s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletPolynomial {
    /// `coefficients[n] = x_n`; slot 0 is unused.
    coefficients: Vec<Complex64>,
}

impl DirichletPolynomial {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::domain("a Dirichlet polynomial needs at least the coefficient x_1"));
        }
        if coefficients.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::domain("Dirichlet coefficients must be finite"));
        }
        let mut coefficients = coefficients;
        coefficients[0] = Complex64::new(0.0, 0.0);
        Ok(Self { coefficients })
    }

    /// From real coefficients `x_1, x_2, …` (no unused leading slot).
    pub fn from_real(xs: &[f64]) -> Result<Self> {
        let mut c = vec![Complex64::new(0.0, 0.0)];
        c.extend(xs.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::new(c)
    }

    pub fn from_truncated(t: &TruncatedCoeffs) -> Result<Self> {
        Self::from_real(&t.values[1..])
    }

    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Self { coefficients: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)] }
    }

    pub fn limit(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coefficients.get(n).copied().unwrap_or_default()
    }

    /// `𝒳₀ = max |x_n|`.
    pub fn x0(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `𝒳₁ = Σ |x_n|/n`.
    pub fn x1(&self) -> f64 {
        let s: CompensatedSum = self.nonzero().map(|(n, c)| c.norm() / n as f64).collect();
        s.value()
    }

    /// `Σ |x_n|²/n`.
    pub fn x2(&self) -> f64 {
        let s: CompensatedSum = self.nonzero().map(|(n, c)| c.norm_sqr() / n as f64).collect();
        s.value()
    }

    fn nonzero(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.coefficients.iter().copied().enumerate().skip(1).filter(|(_, c)| *c != Complex64::default())
    }

    fn terms(&self) -> Vec<Term> {
        self.nonzero()
            .map(|(n, c)| {
                let nf = n as f64;
                Term { ln_n: nf.ln(), scaled: c / nf.sqrt() }
            })
            .collect()
    }

    /// `X(σ + it)` for arbitrary `s`.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.nonzero().map(|(n, c)| c * (-s * (n as f64).ln()).exp()).sum()
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    ln_n: f64,
    scaled: Complex64,
}

/// `Σ x_n n^{−1/2} e^{∓it ln n}`, i.e. `X(1/2 ± it)` with `sign = ±1`.
fn eval_terms(terms: &[Term], t: f64, sign: f64) -> Complex64 {
    let mut acc = crate::sum::ComplexSum::new();
    for term in terms {
        acc.add(term.scaled * Complex64::from_polar(1.0, -sign * t * term.ln_n));
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentKind {
    #[serde(rename = "abs2k")]
    Abs2k,
    #[serde(rename = "cubed")]
    Cubed,
    S1,
    S2,
    #[serde(rename = "signed_odd")]
    SignedOdd,
}

impl MomentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MomentKind::Abs2k => "abs2k",
            MomentKind::Cubed => "cubed",
            MomentKind::S1 => "S1",
            MomentKind::S2 => "S2",
            MomentKind::SignedOdd => "signed_odd",
        }
    }
}

/// One computed sum next to its predicted main term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub phi: Angle,
    pub t_max: f64,
    pub kind: MomentKind,
    pub parameter: f64,
    pub computed: Complex64,
    pub predicted: Complex64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub n_points: usize,
    /// Wall-clock time; not serialized so that reports stay reproducible.
    #[serde(skip)]
    pub eval_seconds: f64,
}

impl MomentReport {
    pub(crate) fn from_parts(
        set: &CriticalSet,
        kind: MomentKind,
        parameter: f64,
        computed: Complex64,
        predicted: Complex64,
        started: Instant,
    ) -> Self {
        let abs_error = (computed - predicted).norm();
        Self {
            phi: set.phi,
            t_max: set.t_max,
            kind,
            parameter,
            computed,
            predicted,
            abs_error,
            rel_error: abs_error / predicted.norm().max(REL_FLOOR),
            n_points: set.points.len(),
            eval_seconds: started.elapsed().as_secs_f64(),
        }
    }

    /// `|computed| / |predicted|`, for comparators with an unknown constant.
    pub fn ratio(&self) -> f64 {
        self.computed.norm() / self.predicted.norm().max(REL_FLOOR)
    }
}

/// `k = p/q` in lowest terms with `p ≥ q ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalExponent {
    pub p: u32,
    pub q: u32,
}

impl RationalExponent {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if q == 0 || p < q {
            return Err(Error::domain(format!("need p >= q >= 1, got p = {p}, q = {q}")));
        }
        if gcd(p, q) != 1 {
            return Err(Error::domain(format!("p = {p} and q = {q} are not coprime")));
        }
        Ok(Self { p, q })
    }

    pub fn k(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn kappa(&self) -> f64 {
        1.0 / self.q as f64
    }

    pub fn r(&self) -> u32 {
        self.p - self.q
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Classified Gram points up to `t_max` together with the normalising height
/// `T = (t_ν + t_{ν+1})/2`, where `t_ν` is the last point not above `t_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    pub phi: Angle,
    pub t_max: f64,
    pub points: Vec<SignedGramPoint>,
    pub t_mid: f64,
}

impl CriticalSet {
    pub fn compute(phi: Angle, t_max: f64, cfg: &EvalConfig) -> Result<Self> {
        Self::from_points(phi, t_max, enumerate(phi, t_max)?, cfg)
    }

    pub fn from_points(phi: Angle, t_max: f64, points: Vec<GramPoint>, cfg: &EvalConfig) -> Result<Self> {
        let next_n = points.last().map(|p| p.n + 1).unwrap_or_else(|| first_index(phi));
        let next = solve_gram(next_n, phi)?;
        let t_mid = match points.last() {
            Some(last) => 0.5 * (last.t + next.t),
            None => t_max,
        };
        let points = classify(&points, cfg)?;
        Ok(Self { phi, t_max, points, t_mid })
    }

    /// The subset with `t ≤ t_max`, re-normalised at the new cut.
    pub fn truncate(&self, t_max: f64) -> Self {
        let cut = self.points.partition_point(|p| p.point.t <= t_max);
        let t_mid = if cut == 0 {
            t_max
        } else if cut < self.points.len() {
            0.5 * (self.points[cut - 1].point.t + self.points[cut].point.t)
        } else {
            self.t_mid
        };
        Self { phi: self.phi, t_max, points: self.points[..cut].to_vec(), t_mid }
    }

    /// `(T/2π) ln(T/2πe)` at the normalising height.
    pub fn main_scale(&self) -> f64 {
        let x = self.t_mid / (2.0 * PI);
        x * (x.ln() - 1.0)
    }
}

fn abs_power(v: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        return 1.0;
    }
    let a = v.abs();
    if a < ZERO_GUARD {
        return 0.0;
    }
    if exponent.fract() == 0.0 && exponent.abs() <= 64.0 {
        return a.powi(exponent as i32);
    }
    (exponent * a.ln()).exp()
}

/// `Σ |ζ(1/2+it_n)|^{2k}` against the comparator `T (log T)^{k²+1} / 2π`.
pub fn moment_abs_2k(set: &CriticalSet, k: f64) -> Result<MomentReport> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::domain(format!("k must be non-negative, got {k}")));
    }
    let started = Instant::now();
    let computed = par_sum(&set.points, |p| abs_power(p.value, 2.0 * k));
    let t = set.t_mid;
    let predicted = t * t.ln().powf(k * k + 1.0) / (2.0 * PI);
    Ok(MomentReport::from_parts(set, MomentKind::Abs2k, k, computed.into(), predicted.into(), started))
}

/// The main term of `Σ ζ(1/2+it_n)³` at height `T`.
pub fn cubed_main_term(phi: Angle, t: f64) -> Result<Complex64> {
    let p3 = crate::divisor::p3_polynomial()?;
    let x = t / (2.0 * PI);
    let phase = Complex64::from_polar(1.0, 3.0 * phi.value());
    let main = 2.0 * phi.value().cos() * x * p3.eval(x.ln()) + 2.0 * (3.0 * phi.value()).cos() * x * (x.ln() - 1.0);
    Ok(phase * main)
}

/// `Σ ζ(1/2+it_n)³ = e^{3iφ} Σ (−1)^n Z(t_n)³`.
pub fn moment_cubed(set: &CriticalSet) -> Result<MomentReport> {
    let started = Instant::now();
    let real = par_sum(&set.points, |p| p.value * p.value * p.value);
    let computed = set.phi.unit().powi(3) * real;
    let predicted = cubed_main_term(set.phi, set.t_mid)?;
    Ok(MomentReport::from_parts(set, MomentKind::Cubed, 3.0, computed, predicted, started))
}

fn check_limits(set: &CriticalSet, polys: &[&DirichletPolynomial]) -> Result<()> {
    let cap = set.t_max.powf(0.25) * (1.0 + 1e-12);
    for x in polys {
        if x.limit() as f64 > cap {
            return Err(Error::Precondition(format!(
                "Dirichlet polynomial length {} exceeds t_max^(1/4) = {}",
                x.limit(),
                set.t_max.powf(0.25)
            )));
        }
    }
    Ok(())
}

/// `(Σ₁, Σ₂)` with `Σ₁ = Σ_{mn≤Y} x_m y_{mn}/(mn)` and `Σ₂ = Σ_{mn≤X} y_m x_{mn}/(mn)`.
pub fn s1_coefficient_sums(x: &DirichletPolynomial, y: &DirichletPolynomial) -> (Complex64, Complex64) {
    let cross = |a: &DirichletPolynomial, b: &DirichletPolynomial| {
        let mut acc = crate::sum::ComplexSum::new();
        for m in 1..=a.limit() {
            let am = a.coeff(m);
            if am == Complex64::default() {
                continue;
            }
            let mut mn = m;
            while mn <= b.limit() {
                acc.add(am * b.coeff(mn) / mn as f64);
                mn += m;
            }
        }
        acc.value()
    };
    (cross(x, y), cross(y, x))
}

pub(crate) fn s1_over_points(set: &CriticalSet, x: &DirichletPolynomial, y: &DirichletPolynomial) -> Complex64 {
    let xt = x.terms();
    let yt = y.terms();
    par_sum_complex(&set.points, |p| {
        p.zeta().conj() * eval_terms(&xt, p.point.t, 1.0) * eval_terms(&yt, p.point.t, -1.0)
    })
}

pub(crate) fn s2_over_points(set: &CriticalSet, x: &DirichletPolynomial) -> f64 {
    let xt = x.terms();
    par_sum(&set.points, |p| eval_terms(&xt, p.point.t, 1.0).norm_sqr())
}

/// `S₁ = Σ ζ(1/2−it_n) X(1/2+it_n) Y(1/2−it_n)`.
pub fn compute_s1(set: &CriticalSet, x: &DirichletPolynomial, y: &DirichletPolynomial) -> Result<MomentReport> {
    check_limits(set, &[x, y])?;
    let started = Instant::now();
    let computed = s1_over_points(set, x, y);
    let (sigma1, sigma2) = s1_coefficient_sums(x, y);
    let rot = Complex64::from_polar(1.0, -2.0 * set.phi.value());
    let predicted = (rot * sigma1 + sigma2) * set.main_scale();
    Ok(MomentReport::from_parts(set, MomentKind::S1, 1.0, computed, predicted, started))
}

/// `S₂ = Σ |X(1/2+it_n)|²`.
pub fn compute_s2(set: &CriticalSet, x: &DirichletPolynomial) -> Result<MomentReport> {
    check_limits(set, &[x])?;
    let started = Instant::now();
    let computed = s2_over_points(set, x);
    let predicted = set.main_scale() * x.x2();
    Ok(MomentReport::from_parts(set, MomentKind::S2, 2.0, computed.into(), predicted.into(), started))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub exponent: RationalExponent,
    pub xi: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub s1: MomentReport,
    pub s2: MomentReport,
    /// `Σ|ζ|^{2k}` with the Hölder lower bound `|S₁|^{2k}/S₂^{2k−1}` as its prediction.
    pub moment: MomentReport,
    pub ln_lower_bound: f64,
    pub holder_holds: bool,
    /// Largest violation of the truncated-convolution invariants.
    pub convolution_defect: f64,
}

/// Relative slack allowed in the Hölder comparison.
pub const HOLDER_SLACK: f64 = 1e-9;

/// Builds `X = (Σ_{n≤ξ} d_κ(n) n^{−s})^p`, `Y = (…)^r` with `κ = 1/q`,
/// `ξ = T^{1/(4p)}` and compares `Σ|ζ|^{2k}` with `|S₁|^{2k}/S₂^{2k−1}`.
pub fn theorem1_pipeline(set: &CriticalSet, kexp: RationalExponent) -> Result<Theorem1Report> {
    let k = kexp.k();
    let xi = set.t_max.powf(1.0 / (4.0 * kexp.p as f64));
    let xc = convolve_truncated(kexp.kappa(), kexp.p, xi)?;
    let yc = convolve_truncated(kexp.kappa(), kexp.r(), xi)?;
    let convolution_defect = xc.invariant_defect()?.max(yc.invariant_defect()?);
    let x = DirichletPolynomial::from_truncated(&xc)?;
    let y = DirichletPolynomial::from_truncated(&yc)?;
    let (sigma1, sigma2) = s1_coefficient_sums(&x, &y);
    let s1 = compute_s1(set, &x, &y)?;
    let s2 = compute_s2(set, &x)?;
    let mut moment = moment_abs_2k(set, k)?;

    let ln_lower_bound = 2.0 * k * s1.computed.norm().ln() - (2.0 * k - 1.0) * s2.computed.re.ln();
    let holder_holds = moment.computed.re.ln() >= ln_lower_bound + (1.0 - HOLDER_SLACK).ln();
    moment.predicted = ln_lower_bound.exp().into();
    moment.abs_error = (moment.computed - moment.predicted).norm();
    moment.rel_error = moment.abs_error / moment.predicted.norm().max(REL_FLOOR);

    Ok(Theorem1Report {
        exponent: kexp,
        xi,
        sigma1: sigma1.re,
        sigma2: sigma2.re,
        s1,
        s2,
        moment,
        ln_lower_bound,
        holder_holds,
        convolution_defect,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedOddMoment {
    pub ell: u32,
    /// `Σ_{t_n^+} |ζ|^{2ℓ+1}` from the sign classification.
    pub plus: f64,
    /// `Σ_{t_n^−} |ζ|^{2ℓ+1}` from the sign classification.
    pub minus: f64,
    /// `½ Σ (|ζ|^{2ℓ+1} + e^{−(2ℓ+1)iφ} ζ^{2ℓ+1})`.
    pub plus_identity: f64,
    /// `½ Σ (|ζ|^{2ℓ+1} − e^{−(2ℓ+1)iφ} ζ^{2ℓ+1})`.
    pub minus_identity: f64,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl SignedOddMoment {
    /// Largest relative disagreement between the two routes.
    pub fn route_disagreement(&self) -> f64 {
        let scale = (self.plus + self.minus).max(REL_FLOOR);
        ((self.plus - self.plus_identity).abs() / scale).max((self.minus - self.minus_identity).abs() / scale)
    }
}

/// Sign-split odd moments, computed directly and through the identity
/// with ζ re-evaluated as `e^{−iθ}Z`.
pub fn signed_odd_moment(set: &CriticalSet, ell: u32, cfg: &EvalConfig) -> Result<SignedOddMoment> {
    let power = 2 * ell + 1;
    let pw = |v: f64| v.abs().powi(power as i32);
    let plus = par_sum(&set.points, |p| if p.sign == Sign::Plus { pw(p.value) } else { 0.0 });
    let minus = par_sum(&set.points, |p| if p.sign == Sign::Minus { pw(p.value) } else { 0.0 });
    let n_plus = set.points.iter().filter(|p| p.sign == Sign::Plus).count();

    let rot = Complex64::from_polar(1.0, -(power as f64) * set.phi.value());
    let pairs: Vec<(f64, f64)> = set
        .points
        .par_iter()
        .map(|p| -> Result<(f64, f64)> {
            let zeta = zeta_critical(p.point.t, cfg)?.zeta;
            Ok((zeta.norm().powi(power as i32), (rot * zeta.powi(power as i32)).re))
        })
        .collect::<Result<_>>()?;
    let abs_sum = par_sum(&pairs, |a| a.0);
    let signed_sum = par_sum(&pairs, |a| a.1);

    Ok(SignedOddMoment {
        ell,
        plus,
        minus,
        plus_identity: 0.5 * (abs_sum + signed_sum),
        minus_identity: 0.5 * (abs_sum - signed_sum),
        n_plus,
        n_minus: set.points.len() - n_plus,
    })
}

/// Largest `|ζ|` in each sign class; `None` for an empty class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxScan {
    pub max_plus: Option<f64>,
    pub max_minus: Option<f64>,
    pub argmax_plus: Option<f64>,
    pub argmax_minus: Option<f64>,
}

pub fn max_scan(set: &CriticalSet) -> MaxScan {
    let mut out = MaxScan { max_plus: None, max_minus: None, argmax_plus: None, argmax_minus: None };
    for p in &set.points {
        let v = p.value.abs();
        let (best, arg) = match p.sign {
            Sign::Plus => (&mut out.max_plus, &mut out.argmax_plus),
            Sign::Minus => (&mut out.max_minus, &mut out.argmax_minus),
        };
        if best.is_none_or(|b| v > b) {
            *best = Some(v);
            *arg = Some(p.point.t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(phi: f64, t_max: f64) -> CriticalSet {
        CriticalSet::compute(Angle::new(phi).unwrap(), t_max, &EvalConfig::default()).unwrap()
    }

    #[test]
    fn rational_exponent_validation() {
        assert!(RationalExponent::new(3, 2).is_ok());
        assert!(RationalExponent::new(1, 1).is_ok());
        assert!(RationalExponent::new(4, 2).is_err());
        assert!(RationalExponent::new(1, 2).is_err());
        let k = RationalExponent::new(3, 2).unwrap();
        assert_eq!((k.k(), k.kappa(), k.r()), (1.5, 0.5, 1));
    }

    #[test]
    fn midpoint_normalisation() {
        let s = set(0.0, 50.0);
        assert_eq!(s.points.len(), 9);
        assert!(s.t_mid > 48.71 && s.t_mid < 51.74);
        let small = s.truncate(30.0);
        assert_eq!(small.points.len(), 3);
        assert!((small.t_mid - 0.5 * (27.670_182_217_816_3 + 31.717_979_954_764_1)).abs() < 1e-9);
    }

    #[test]
    fn zeroth_moment_counts_points() {
        let s = set(0.0, 1000.0);
        let r = moment_abs_2k(&s, 0.0).unwrap();
        assert_eq!(r.computed.re, s.points.len() as f64);
    }

    #[test]
    fn coefficient_sums_example() {
        let x = DirichletPolynomial::from_real(&[1.0, 1.0]).unwrap();
        let y = DirichletPolynomial::one();
        let (s1, s2) = s1_coefficient_sums(&x, &y);
        assert_eq!(s1.re, 1.0);
        assert_eq!(s2.re, 1.5);
    }

    #[test]
    fn dirichlet_polynomial_evaluation() {
        let x = DirichletPolynomial::from_real(&[1.0, 2.0, 0.0, -1.0]).unwrap();
        let t = 123.4;
        let s = Complex64::new(0.5, t);
        assert!((x.eval(s) - eval_terms(&x.terms(), t, 1.0)).norm() < 1e-13);
        assert!((x.eval(s.conj()) - eval_terms(&x.terms(), t, -1.0)).norm() < 1e-13);
        assert_eq!(x.x0(), 2.0);
        assert!((x.x1() - 2.25).abs() < 1e-15);
    }

    #[test]
    fn length_precondition() {
        let s = set(0.0, 200.0);
        let long = DirichletPolynomial::from_real(&[1.0; 5]).unwrap();
        assert!(matches!(compute_s2(&s, &long), Err(Error::Precondition(_))));
    }

    #[test]
    fn cubed_terms_are_real_at_zero_angle() {
        let s = set(0.0, 2000.0);
        let r = moment_cubed(&s).unwrap();
        assert!(r.computed.im.abs() <= 1e-12 * r.computed.norm());
    }

    #[test]
    fn signed_routes_agree() {
        let s = set(PI / 3.0, 3000.0);
        let m = signed_odd_moment(&s, 1, &EvalConfig::default()).unwrap();
        assert!(m.route_disagreement() <= 1e-6);
        let all = moment_abs_2k(&s, 1.5).unwrap().computed.re;
        assert!(((m.plus + m.minus) - all).abs() <= 1e-9 * all);
    }

    #[test]
    fn holder_on_small_set() {
        let s = set(0.0, 5000.0);
        let r = theorem1_pipeline(&s, RationalExponent::new(3, 2).unwrap()).unwrap();
        assert!(r.holder_holds);
        assert!(r.sigma2 >= r.sigma1);
        assert_eq!(r.convolution_defect, 0.0);
    }

    #[test]
    fn max_scan_handles_empty_classes() {
        let s = set(0.0, 10.0);
        let m = max_scan(&s);
        assert!(m.max_plus.is_none() && m.max_minus.is_none());
    }
}
