use proptest::prelude::*;
use zeta_gram::divisor::{build_table, convolve_truncated, d_kappa, truncation_index};
use zeta_gram::io::{decode_divisor_table, encode_divisor_table};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn d_kappa_is_multiplicative(a in 1u64..5_000, b in 1u64..5_000, kappa in 0.1f64..4.0) {
        prop_assume!(gcd(a, b) == 1);
        let lhs = d_kappa(a * b, kappa).unwrap();
        let rhs = d_kappa(a, kappa).unwrap() * d_kappa(b, kappa).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn d2_counts_divisors(n in 1u64..20_000) {
        let count = (1..=n).filter(|d| n % d == 0).count() as f64;
        prop_assert_eq!(d_kappa(n, 2.0).unwrap(), count);
    }

    #[test]
    fn truncated_powers_satisfy_their_invariants(q in 1u32..4, m in 1u32..4, xi in 2.0f64..60.0) {
        let c = convolve_truncated(1.0 / q as f64, m, xi).unwrap();
        prop_assert_eq!(c.invariant_defect().unwrap(), 0.0);
        prop_assert_eq!(c.limit(), truncation_index(xi).pow(m));
    }

    #[test]
    fn table_dump_round_trips(kappa in 0.25f64..4.0, limit in 1usize..300) {
        let t = build_table(kappa, limit).unwrap();
        let back = decode_divisor_table(&encode_divisor_table(&t)).unwrap();
        prop_assert_eq!(back, t);
    }
}
