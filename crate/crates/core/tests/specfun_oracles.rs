mod common;

use hiswipt::specfun::*;
use proptest::prelude::*;

const Z_GRID: [f64; 5] = [0.01, 0.1, 1.0, 5.0, 20.0];

#[test]
fn incomplete_gamma_identity() {
    for m in 1..=10 {
        for &z in &Z_GRID {
            let lo = lower_incomplete_gamma_int(m, z).unwrap();
            let up = upper_incomplete_gamma_int(m, z).unwrap();
            let full = factorial(m - 1);
            assert!(((lo + up) - full).abs() <= 1e-12 * full, "m={m} z={z}");
            let sum = gamma_p_int(m, z).unwrap() + gamma_q_int(m, z).unwrap();
            assert!((sum - 1.0).abs() <= 1e-12, "m={m} z={z}");
        }
    }
}

#[test]
fn lower_gamma_against_quadrature() {
    for m in 1..=10 {
        for &z in &Z_GRID {
            let want = common::lower_gamma_oracle(m, z);
            let got = lower_incomplete_gamma_int(m, z).unwrap();
            assert!(
                (got - want).abs() <= 1e-9 * want.abs(),
                "m={m} z={z}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn bessel_against_integral_representation() {
    let zs: Vec<f64> = (0..24)
        .map(|i| 0.05 * (600f64).powf(i as f64 / 23.0))
        .collect();
    let mut worst = 0f64;
    for n in 0..=10 {
        for &z in &zs {
            let want = common::scaled_bessel_k_oracle(n, z);
            let got = bessel_k_int_scaled(n, z).unwrap();
            let rel = ((got - want) / want).abs();
            worst = worst.max(rel);
            assert!(rel <= 1e-8, "n={n} z={z}: {got} vs {want}");
        }
    }
    eprintln!("worst Bessel relative error {worst:e}");
}

#[test]
fn bessel_recurrence() {
    for &z in &[0.1, 0.7, 1.9, 2.1, 8.0, 40.0] {
        for n in 1..30 {
            let lhs = bessel_k_int_scaled(n + 1, z).unwrap();
            let rhs = bessel_k_int_scaled(n - 1, z).unwrap()
                + 2.0 * n as f64 / z * bessel_k_int_scaled(n, z).unwrap();
            assert!(((lhs - rhs) / lhs).abs() <= 1e-10, "n={n} z={z}");
        }
    }
}

#[test]
fn bessel_decreasing_in_z_increasing_in_order() {
    for n in 0..8 {
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let z = 0.05 * i as f64;
            let v = bessel_k_int(n, z).unwrap();
            assert!(v < prev, "n={n} z={z}");
            assert!(bessel_k_int(n + 1, z).unwrap() >= v);
            prev = v;
        }
    }
}

#[test]
fn ln_bessel_consistent() {
    for n in [0, 3, 9] {
        for z in [0.2, 3.0, 50.0, 300.0] {
            let direct = bessel_k_int(n, z).unwrap().ln();
            assert!(
                (ln_bessel_k_int(n, z).unwrap() - direct).abs() < 1e-12 * direct.abs().max(1.0)
            );
        }
    }
    // No underflow far past the double range.
    assert!(ln_bessel_k_int(2, 2000.0).unwrap().is_finite());
}

#[test]
fn chebyshev_nodes_are_roots() {
    for n in [1, 2, 5, 8, 32, 64] {
        let nodes = chebyshev_nodes(n).unwrap();
        assert_eq!(nodes.order(), n);
        for &v in nodes.nodes() {
            // T_N(cos θ) = cos(Nθ)
            let t = (n as f64 * v.acos()).cos();
            assert!(t.abs() < 1e-12, "N={n} v={v}");
        }
    }
}

#[test]
fn chebyshev_rule_converges_on_smooth_integrand() {
    let exact = 1.0 - (-2f64).exp();
    let mut prev = f64::INFINITY;
    for n in [4, 8, 16, 32, 64] {
        let err = (chebyshev_nodes(n)
            .unwrap()
            .integrate(0.0, 2.0, |x| (-x).exp())
            - exact)
            .abs();
        assert!(err < prev);
        prev = err;
    }
    assert!(prev < 1e-3);
}

#[test]
fn domain_errors() {
    assert!(gamma_p_int(0, 1.0).is_err());
    assert!(gamma_q_int(2, -1.0).is_err());
    assert!(gamma_q_int(2, f64::NAN).is_err());
    assert!(bessel_k_int(1, 0.0).is_err());
    assert!(chebyshev_nodes(0).is_err());
}

proptest! {
    #![proptest_config(common::prop_config(256))]

    #[test]
    fn regularized_gamma_complementary(m in 1u32..40, z in 0.0f64..200.0) {
        let p = gamma_p_int(m, z).unwrap();
        let q = gamma_q_int(m, z).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((0.0..=1.0).contains(&q));
        prop_assert!((p + q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regularized_gamma_monotone(m in 1u32..20, z in 0.0f64..60.0, dz in 1e-3f64..5.0) {
        prop_assert!(gamma_p_int(m, z + dz).unwrap() >= gamma_p_int(m, z).unwrap());
        prop_assert!(gamma_p_int(m + 1, z).unwrap() <= gamma_p_int(m, z).unwrap() + 1e-15);
    }

    #[test]
    fn bessel_scaled_matches_unscaled(n in 0u32..12, z in 0.01f64..600.0) {
        let a = bessel_k_int(n, z).unwrap();
        let b = bessel_k_int_scaled(n, z).unwrap() * (-z).exp();
        prop_assert!(((a - b) / b).abs() < 1e-12);
    }

    #[test]
    fn binomial_pascal(n in 1u64..60, k in 1u64..60) {
        prop_assume!(k <= n);
        prop_assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
    }
}
