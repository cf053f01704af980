//! Key-rate layer against independently computed reference values and the
//! numerical symplectic-spectrum route.

use cvqkd::channel::ReceiverParams;
use cvqkd::harness::{sweep_distance, SystemConfig};
use cvqkd::security::{holevo_terms, key_rate_pipeline, SecurityParams};
use cvqkd::symplectic::generic_holevo;
use proptest::prelude::*;

/// Asymptotic rates (bit/s) from a separate numpy implementation of the
/// same trusted-detector model, f (1 - a) = 0.5e9.
const REFERENCE_RATES: &[(f64, f64)] = &[(0.0, 11.48e6), (28.6, 1.434e6), (50.0, 0.324e6)];

#[test]
fn asymptotic_rates_match_reference() {
    let cfg = SystemConfig::default();
    for &(km, want) in REFERENCE_RATES {
        let got = sweep_distance(&cfg, &[km]).unwrap()[0].k_asym;
        assert!((got / want - 1.0).abs() < 2e-3, "{km} km: {got} vs {want}");
    }
    let far = sweep_distance(&cfg, &[100.0]).unwrap()[0].k_asym;
    assert_eq!(far, 0.0);
}

#[test]
fn trusted_electronic_noise_lowers_holevo_bound() {
    let t = 10f64.powf(-(28.6 * 0.2 + 5.0) / 10.0);
    let eta = ReceiverParams::default().efficiency().unwrap();
    let h = holevo_terms(8.0, t, 0.055, eta, 0.2212).unwrap();
    assert!((h.chi_be - 0.08189124985427432).abs() < 1e-9, "{}", h.chi_be);
    let p = SecurityParams {
        v_el_trusted: 0.2212,
        ..SecurityParams::default()
    };
    let trusted = key_rate_pipeline(&p, None).unwrap();
    let untrusted = key_rate_pipeline(&SecurityParams::default(), None).unwrap();
    assert!(trusted.chi_be < untrusted.chi_be);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn closed_form_matches_generic(
        v_mod in 0.1f64..60.0,
        log_t in -4.0f64..0.0,
        eps in 0.0f64..0.3,
        eta in 0.02f64..0.98,
        v_el in 0.0f64..1.0,
    ) {
        let t = 10f64.powf(log_t);
        let c = holevo_terms(v_mod, t, eps, eta, v_el).unwrap();
        let g = generic_holevo(v_mod, t, eps, eta, v_el).unwrap();
        prop_assert!((c.nu1 - g.eve[1]).abs() < 1e-9);
        prop_assert!((c.nu2 - g.eve[0]).abs() < 1e-9);
        prop_assert!((c.nu3 - g.conditional[2]).abs() < 1e-9);
        prop_assert!((c.nu4 - g.conditional[1]).abs() < 1e-9);
        prop_assert!((c.chi_be - g.chi_be).abs() < 1e-8);
        prop_assert!(c.chi_be >= 0.0);
        prop_assert!([c.nu1, c.nu2, c.nu3, c.nu4].iter().all(|&n| n >= 1.0 - 1e-9));
    }
}
