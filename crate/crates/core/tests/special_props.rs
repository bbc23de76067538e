use proptest::prelude::*;
use zeta_gram::special::{delta, hardy_z, theta, theta_deriv, zeta_critical, zeta_euler_maclaurin, EvalConfig};
use zeta_gram::Complex64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn delta_is_unimodular_on_the_critical_line(t in 1.0f64..1e5) {
        let d = delta(Complex64::new(0.5, t)).unwrap();
        prop_assert!((d.norm() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn delta_reflection(sigma in -4.0f64..5.0, t in -60.0f64..60.0) {
        prop_assume!((sigma - 1.0).abs() + t.abs() > 0.1 && sigma.abs() + t.abs() > 0.1);
        let s = Complex64::new(sigma, t);
        let v = delta(s).unwrap() * delta(Complex64::new(1.0, 0.0) - s).unwrap();
        prop_assert!((v - 1.0).norm() <= 1e-8, "s = {s}, product = {v}");
    }

    #[test]
    fn hardy_z_matches_euler_maclaurin(t in 50.0f64..500.0) {
        let cfg = EvalConfig::default();
        let z = hardy_z(t, &cfg).unwrap();
        let em = Complex64::from_polar(1.0, theta(t).unwrap()) * zeta_euler_maclaurin(Complex64::new(0.5, t), &cfg).unwrap();
        prop_assert!((em.re - z).abs() <= 1e-6 && em.im.abs() <= 1e-6);
    }

    #[test]
    fn sample_satisfies_rotation_identity(t in 20.0f64..2e4) {
        let s = zeta_critical(t, &EvalConfig::default()).unwrap();
        prop_assert!(s.invariant_defect() <= 1e-9 * s.z.abs().max(1.0));
    }

    #[test]
    fn theta_is_increasing_past_its_minimum(t in 7.0f64..1e6, h in 1e-3f64..1.0) {
        prop_assert!(theta(t + h).unwrap() > theta(t).unwrap());
        prop_assert!(theta_deriv(t).unwrap() > 0.0);
    }
}

#[test]
fn zeta_conjugate_symmetry() {
    let cfg = EvalConfig::default();
    for (re, im) in [(0.5, 14.0), (2.0, 3.0), (-1.5, 7.0), (0.3, 100.0)] {
        let a = zeta_euler_maclaurin(Complex64::new(re, im), &cfg).unwrap();
        let b = zeta_euler_maclaurin(Complex64::new(re, -im), &cfg).unwrap();
        assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
    }
}
