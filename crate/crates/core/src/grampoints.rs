//! Generalized Gram points `t_n(φ)`: the roots of `θ(t) = πn − φ` on the
//! increasing branch `t > 2π`, where `ζ(1/2+it)` crosses the line `e^{iφ}ℝ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::special::{
    delta, hardy_z, theta, theta_dd, theta_deriv, zeta_critical, zeta_euler_maclaurin, EvalConfig, THETA_MIN_T,
};
use crate::sum::{DoubleDouble, PI_DD};
use crate::{Error, Result};

/// θ(2π), the minimum of theta.
pub const THETA_AT_MIN: f64 = -3.530_971_066_598_538;

/// Points emitted by [`enumerate`] satisfy `πn − φ > THETA_AT_MIN + BRANCH_MARGIN`.
pub const BRANCH_MARGIN: f64 = 0.5;

/// Values with magnitude below this are flagged as ambiguous.
pub const AMBIGUOUS_VALUE: f64 = 1e-9;

const NEWTON_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 30;

/// A direction `φ ∈ [0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(phi: f64) -> Result<Self> {
        if !(0.0..PI).contains(&phi) {
            return Err(Error::domain(format!("phi must be in [0, pi), got {phi}")));
        }
        Ok(Angle(phi))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `e^{iφ}`.
    pub fn unit(self) -> Complex64 {
        Complex64::from_polar(1.0, self.0)
    }
}

impl TryFrom<f64> for Angle {
    type Error = Error;

    fn try_from(phi: f64) -> Result<Self> {
        Angle::new(phi)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramPoint {
    pub n: i64,
    pub phi: Angle,
    pub t: f64,
}

impl GramPoint {
    fn target(n: i64, phi: Angle) -> DoubleDouble {
        PI_DD.mul_f64(n as f64).add_f64(-phi.value())
    }

    /// `θ(t) − (πn − φ)`, evaluated in double-double.
    pub fn theta_residual(&self) -> f64 {
        match theta_dd(self.t) {
            Ok(th) => th.sub(Self::target(self.n, self.phi)).to_f64(),
            Err(_) => f64::NAN,
        }
    }

    /// `|Δ(1/2 + it) − e^{2iφ}|`.
    pub fn delta_residual(&self) -> f64 {
        match delta(Complex64::new(0.5, self.t)) {
            Ok(d) => (d - Complex64::from_polar(1.0, 2.0 * self.phi.value())).norm(),
            Err(_) => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedGramPoint {
    pub point: GramPoint,
    pub sign: Sign,
    /// `e^{−iφ} ζ(1/2 + it_n) = (−1)^n Z(t_n)`.
    pub value: f64,
    /// `|value| < 1e-9`; such points keep the `+` sign.
    pub ambiguous: bool,
}

impl SignedGramPoint {
    /// `ζ(1/2 + it_n) = e^{iφ} · value`.
    pub fn zeta(&self) -> Complex64 {
        self.point.phi.unit() * self.value
    }

    /// Hardy's `Z(t_n)`.
    pub fn z(&self) -> f64 {
        if self.point.n.rem_euclid(2) == 0 {
            self.value
        } else {
            -self.value
        }
    }
}

/// `h(t) = (t/2) ln(t/2πe) − π/8`, the leading part of theta.
fn theta_leading(t: f64) -> f64 {
    0.5 * t * ((t / (2.0 * PI)).ln() - 1.0) - PI / 8.0
}

/// Inverse of [`theta_leading`] on `[2π, ∞)`, clamped to `2π` below its range.
fn theta_leading_inverse(y: f64) -> f64 {
    if y <= theta_leading(THETA_MIN_T) {
        return THETA_MIN_T;
    }
    // h is convex and increasing here, so Newton from the right is monotone
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let mut t = (2.0 * PI * e2).max(2.0 * (y + PI / 8.0) + 1.0);
    for _ in 0..100 {
        let step = (theta_leading(t) - y) / (0.5 * (t / (2.0 * PI)).ln());
        t -= step;
        if step.abs() <= 1e-15 * t {
            break;
        }
    }
    t.max(THETA_MIN_T)
}

/// Solves `θ(t) = πn − φ` for `t > 2π`.
///
/// Any target above `θ(2π)` has exactly one root on the increasing branch.
/// [`enumerate`] additionally keeps a margin of [`BRANCH_MARGIN`] away from
/// the minimum.
pub fn solve_gram(n: i64, phi: Angle) -> Result<GramPoint> {
    let target_dd = GramPoint::target(n, phi);
    let target = target_dd.to_f64();
    if target <= THETA_AT_MIN {
        return Err(Error::OutOfBranch { n, phi: phi.value() });
    }
    let residual = |t: f64| -> Result<f64> { Ok(theta_dd(t)?.sub(target_dd).to_f64()) };

    let mut lo = theta_leading_inverse(target - PI / 2.0);
    let mut hi = theta_leading_inverse(target + PI / 2.0);
    while residual(hi)? < 0.0 {
        hi *= 2.0;
    }
    while lo > THETA_MIN_T && residual(lo)? > 0.0 {
        lo = (0.5 * lo).max(THETA_MIN_T);
    }

    let mut t = theta_leading_inverse(target).clamp(lo, hi);
    let mut converged = false;
    for _ in 0..MAX_NEWTON {
        let r = residual(t)?;
        if r.abs() <= NEWTON_TOL {
            converged = true;
            break;
        }
        if r > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let slope = theta_deriv(t).unwrap_or(0.0);
        let newton = t - r / slope;
        t = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    if !converged {
        while hi - lo > 2.0 * f64::EPSILON * hi {
            let mid = 0.5 * (lo + hi);
            if residual(mid)? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        t = 0.5 * (lo + hi);
    }

    // settle on the closest representable abscissa
    let mut best = (residual(t)?.abs(), t);
    for cand in [t.next_down(), t.next_up()] {
        let r = residual(cand)?.abs();
        if r < best.0 {
            best = (r, cand);
        }
    }
    Ok(GramPoint { n, phi, t: best.1 })
}

/// First index on the canonical branch for this angle.
pub fn first_index(phi: Angle) -> i64 {
    let floor = THETA_AT_MIN + BRANCH_MARGIN;
    let mut n = ((floor + phi.value()) / PI).floor() as i64;
    while PI * n as f64 - phi.value() <= floor {
        n += 1;
    }
    n
}

/// All canonical-branch Gram points with `t ≤ t_max`, in increasing order.
///
/// Points are solved in parallel and collected in index order, so the result
/// does not depend on the number of worker threads.
pub fn enumerate(phi: Angle, t_max: f64) -> Result<Vec<GramPoint>> {
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(Error::domain(format!("t_max must be positive and finite, got {t_max}")));
    }
    let n0 = first_index(phi);
    if t_max <= THETA_MIN_T {
        return Ok(Vec::new());
    }
    let mut n1 = ((theta(t_max)? + phi.value()) / PI).floor() as i64 + 1;
    if n1 < n0 {
        return Ok(Vec::new());
    }
    // one spare index on either side of the estimate, trimmed below
    n1 += 1;
    let mut points: Vec<GramPoint> = (n0..=n1).into_par_iter().map(|n| solve_gram(n, phi)).collect::<Result<_>>()?;
    points.retain(|p| p.t <= t_max);
    Ok(points)
}

/// Attaches `e^{−iφ}ζ(1/2+it_n) = (−1)^n Z(t_n)` and its sign class.
///
/// Every hundredth point is cross-checked against an independent evaluation
/// of `Re(e^{−iφ}ζ)`; a mismatch above `1e-6` is reported as an error.
pub fn classify(points: &[GramPoint], cfg: &EvalConfig) -> Result<Vec<SignedGramPoint>> {
    cfg.validate()?;
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let z = hardy_z(p.t, cfg)?;
            let value = if p.n.rem_euclid(2) == 0 { z } else { -z };
            if i % 100 == 0 {
                let check = cross_check_value(p, cfg)?;
                if (check - value).abs() > 1e-6 {
                    return Err(Error::Consistency(format!(
                        "value at t = {} is {value}, independent evaluation gives {check}",
                        p.t
                    )));
                }
            }
            let ambiguous = value.abs() < AMBIGUOUS_VALUE;
            let sign = if value >= 0.0 || ambiguous { Sign::Plus } else { Sign::Minus };
            Ok(SignedGramPoint { point: *p, sign, value, ambiguous })
        })
        .collect()
}

fn cross_check_value(p: &GramPoint, cfg: &EvalConfig) -> Result<f64> {
    let rot = Complex64::from_polar(1.0, -p.phi.value());
    if p.t <= 500.0 {
        let zeta = zeta_euler_maclaurin(Complex64::new(0.5, p.t), cfg)?;
        Ok((rot * zeta).re)
    } else {
        Ok((rot * zeta_critical(p.t, cfg)?.zeta).re)
    }
}

/// `(θ(t_max) + φ)/π`, the smooth count of Gram points up to `t_max`.
pub fn count_estimate(phi: Angle, t_max: f64) -> Result<f64> {
    Ok((theta(t_max)? + phi.value()) / PI)
}
