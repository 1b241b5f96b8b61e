mod common;

use hiswipt::analysis::*;
use hiswipt::analytic::{hi_ceiling_levels_for, system_outage};
use hiswipt::system::*;
use hiswipt::{Engine, FadingDraw, Regime, SweepAxis};
use proptest::prelude::*;

proptest! {
    #![proptest_config(common::prop_config(256))]

    #[test]
    fn ceilings_ordered(k1 in 0.001f64..0.5, k2 in 0.0f64..0.5, eta in 0.05f64..1.0, beta in 0.01f64..0.99) {
        let p = SystemParams { k1, k2, eta, beta, ..SystemParams::default() };
        let c = derive_constants(&p).unwrap();
        prop_assert!(c.rcc_threshold < c.relay_cutoff);
        prop_assert!(c.relay_cutoff < c.osc_threshold);
        prop_assert!((c.relay_cutoff - c.i1 / c.i2).abs() <= 1e-12 * c.relay_cutoff);
        // The ceilings depend on the impairment level only.
        let u = p.impairment();
        prop_assert!((c.relay_cutoff - 1.0 / (u * (2.0 + u))).abs() <= 1e-10 * c.relay_cutoff);
    }

    #[test]
    fn sndrs_bounded_by_ceilings(k in 0.01f64..0.3, x in 1e-6f64..1e3, y in 1e-6f64..1e3, z in 1e-6f64..1e3, lr in 0.0f64..12.0) {
        let p = SystemParams { rho: 10f64.powf(lr), ..SystemParams::default().with_k_ave(k) };
        let c = derive_constants(&p).unwrap();
        let d = FadingDraw::new(x, y, z);
        prop_assert!(sndr_direct(z, &p) < c.osc_threshold);
        for t in [Terminal::A, Terminal::B] {
            prop_assert!(sndr_relay_tdbc(&d, t, &p).unwrap() < c.relay_cutoff);
        }
    }

    #[test]
    fn sndrs_increase_with_gain(k in 0.0f64..0.3, x in 1e-4f64..1e2, y in 1e-4f64..1e2, f in 1.01f64..10.0) {
        let p = SystemParams::default().with_k_ave(k);
        prop_assert!(sndr_direct(x * f, &p) > sndr_direct(x, &p));
        let a = sndr_relay_tdbc(&FadingDraw::new(x, y, 0.0), Terminal::A, &p).unwrap();
        // Growing the other hop helps; growing one's own hop can hurt through
        // the distortion term, so only the other hop is monotone in general.
        let b = sndr_relay_tdbc(&FadingDraw::new(x, y * f, 0.0), Terminal::A, &p).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn relay_cutoff_decreases_with_impairment(k in 0.001f64..0.4, dk in 0.001f64..0.1) {
        let a = derive_constants(&SystemParams::default().with_k_ave(k)).unwrap();
        let b = derive_constants(&SystemParams::default().with_k_ave(k + dk)).unwrap();
        prop_assert!(b.rcc_threshold < a.rcc_threshold);
        prop_assert!(b.osc_threshold < a.osc_threshold);
    }

    #[test]
    fn ceiling_levels_invert_thresholds(g in 1e-2f64..1e4) {
        let (k_rcc, k_osc) = hi_ceiling_levels_for(g);
        prop_assert!(k_rcc < k_osc);
        let c = derive_constants(&SystemParams::default().with_k_ave(k_rcc)).unwrap();
        prop_assert!((c.rcc_threshold - g).abs() <= 1e-9 * g);
        let c = derive_constants(&SystemParams::default().with_k_ave(k_osc)).unwrap();
        prop_assert!((c.osc_threshold - g).abs() <= 1e-9 * g);
    }

    #[test]
    fn energy_efficiency_formula(r in 0.1f64..1.2, lr in 2.0f64..7.0) {
        let p = SystemParams { r_th: r, rho: 10f64.powf(lr), ..SystemParams::default() };
        let pout = system_outage(&p).unwrap().p_out;
        let ee = energy_efficiency(&p).unwrap();
        prop_assert!((ee - 1.5 * (1.0 - pout) * r / p.tx_power()).abs() <= 1e-12 * ee.abs().max(1e-300));
    }
}

#[test]
fn protocol_thresholds() {
    let p = SystemParams::default();
    assert!((p.gamma_threshold(Protocol::Tdbc) - 7.0).abs() < 1e-12);
    assert!((p.gamma_threshold(Protocol::Mabc) - 3.0).abs() < 1e-12);
    assert!((p.gamma_threshold(Protocol::Direct) - 3.0).abs() < 1e-12);
}

#[test]
fn rho_sweep_decreasing_and_ordered() {
    let p = SystemParams::default();
    let grid: Vec<f64> = (0..9).map(|i| 10f64.powf(2.0 + 0.5 * i as f64)).collect();
    let rows = sweep(&p, SweepAxis::Rho, &grid, Engine::Analytic, 0, 0).unwrap();
    assert_eq!(rows.len(), grid.len());
    for (row, g) in rows.iter().zip(&grid) {
        assert_eq!(row.axis_value, *g);
        assert!(row.error.is_none());
    }
    for w in rows.windows(2) {
        assert!(w[1].p_out_analytic.unwrap() < w[0].p_out_analytic.unwrap());
    }
}

#[test]
fn rate_sweep_crosses_every_regime() {
    let p = SystemParams::default();
    let grid: Vec<f64> = (0..26).map(|i| 0.1 * i as f64).collect();
    let rows = sweep(&p, SweepAxis::RTh, &grid, Engine::Analytic, 0, 0).unwrap();
    let regimes: Vec<Regime> = rows.iter().filter_map(|r| r.regime).collect();
    for want in [Regime::Cooperative, Regime::DirectOnly, Regime::FullOutage] {
        assert!(regimes.contains(&want));
    }
    // Regimes only degrade as the rate grows.
    let rank = |r: &Regime| match r {
        Regime::Cooperative => 0,
        Regime::DirectOnly => 1,
        Regime::FullOutage => 2,
    };
    assert!(regimes.windows(2).all(|w| rank(&w[0]) <= rank(&w[1])));
}

#[test]
fn sweep_with_simulation_is_reproducible() {
    let p = SystemParams::default();
    let grid = [0.3, 0.6, 0.9];
    let a = sweep(&p, SweepAxis::Beta, &grid, Engine::Both, 50_000, 3).unwrap();
    let b = sweep(&p, SweepAxis::Beta, &grid, Engine::Both, 50_000, 3).unwrap();
    assert_eq!(a, b);
    for r in &a {
        let (an, mc, se) = (
            r.p_out_analytic.unwrap(),
            r.p_out_mc.unwrap(),
            r.mc_stderr.unwrap(),
        );
        assert!((an - mc).abs() < 4.0 * se.max(1e-4));
    }
}

#[test]
fn optimum_beats_grid_neighbours() {
    let p = SystemParams {
        r_th: 0.5,
        ..SystemParams::default()
    };
    let opt = optimal_beta(&p, 64).unwrap();
    let b = opt.beta_opt.unwrap();
    assert!(!opt.degenerate);
    for &(beta, v) in &opt.coarse {
        assert!(opt.p_out_min <= v + 1e-12, "β={beta}");
    }
    let at = |beta: f64| {
        system_outage(&SystemParams { beta, ..p.clone() })
            .unwrap()
            .p_out
    };
    assert!(at(b) <= at((b - 0.02).max(0.01)));
    assert!(at(b) <= at((b + 0.02).min(0.99)));
}

#[test]
fn diversity_fit_of_exact_power_law() {
    let pts: Vec<(f64, f64)> = (0..6)
        .map(|i| {
            let rho = 10f64.powi(i + 3);
            (rho, 3.0 * rho.powi(-2))
        })
        .collect();
    assert!((fit_diversity(&pts).unwrap() - 2.0).abs() < 1e-12);
}
