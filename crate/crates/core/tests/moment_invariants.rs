use std::f64::consts::PI;

use num_complex::Complex64;
use zeta_gram::moments::{
    compute_s1, compute_s2, moment_abs_2k, signed_odd_moment, theorem1_pipeline, CriticalSet, DirichletPolynomial,
    RationalExponent,
};
use zeta_gram::special::{zeta_critical, EvalConfig};

fn set(phi: f64, t_max: f64) -> CriticalSet {
    CriticalSet::compute(zeta_gram::grampoints::Angle::new(phi).unwrap(), t_max, &EvalConfig::default()).unwrap()
}

#[test]
fn cube_terms_match_rotated_hardy_values() {
    let cfg = EvalConfig::default();
    for phi in [0.0, 0.9, 2.7] {
        let s = set(phi, 3e3);
        let rot = Complex64::from_polar(1.0, 3.0 * phi);
        for p in s.points.iter().step_by(7) {
            let zeta = zeta_critical(p.point.t, &cfg).unwrap().zeta;
            let sign = if p.point.n % 2 == 0 { 1.0 } else { -1.0 };
            let direct = zeta.powi(3);
            let via_z = rot * sign * p.z().powi(3);
            assert!((direct - via_z).norm() <= 1e-9 * direct.norm().max(1e-6));
            assert!((zeta.norm_sqr() - p.z().powi(2)).abs() <= 1e-9 * zeta.norm_sqr().max(1e-6));
        }
    }
}

#[test]
fn real_mollifier_gives_real_first_moment() {
    let s = set(0.0, 1e4);
    let x = DirichletPolynomial::from_real(&[1.0, -0.5, 0.25]).unwrap();
    let r = compute_s1(&s, &x, &x).unwrap();
    assert!(r.computed.im.abs() <= 1e-6 * r.computed.norm());
    assert!(compute_s2(&s, &x).unwrap().computed.re >= 0.0);
}

#[test]
fn holder_bound_holds_off_axis() {
    for phi in [PI / 5.0, 1.3, 2.9] {
        let s = set(phi, 2e4);
        for (p, q) in [(1, 1), (3, 2), (2, 1)] {
            let rep = theorem1_pipeline(&s, RationalExponent::new(p, q).unwrap()).unwrap();
            assert!(rep.holder_holds, "phi = {phi}, k = {p}/{q}");
            assert_eq!(rep.convolution_defect, 0.0);
        }
    }
}

#[test]
fn signed_classes_partition_the_absolute_moment() {
    let cfg = EvalConfig::default();
    let s = set(PI / 3.0, 5e3);
    let m = signed_odd_moment(&s, 1, &cfg).unwrap();
    let total = moment_abs_2k(&s, 1.5).unwrap().computed.re;
    assert!(((m.plus + m.minus) - total).abs() <= 1e-9 * total);
    assert!(m.route_disagreement() <= 1e-6);
    assert_eq!(m.n_plus + m.n_minus, s.points.len());
}

#[test]
fn long_mollifier_is_refused() {
    let s = set(0.0, 1e3);
    let long = DirichletPolynomial::from_real(&[1.0; 10]).unwrap();
    assert!(compute_s2(&s, &long).is_err());
}
