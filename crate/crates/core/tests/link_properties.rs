use std::f64::consts::{FRAC_PI_4, PI};

use proptest::prelude::*;
use uwqkd_core::analysis::{qber_root, QBER_SECURITY_BOUND};
use uwqkd_core::environment::{
    arm_efficiencies, depolarization_probabilities, loss_probabilities, noise_counts_y0,
    transmittance,
};
use uwqkd_core::{evaluate_link, AtmosphericScenario, LinkConfig, WaterKind};

fn all_links() -> impl Iterator<Item = LinkConfig> {
    WaterKind::ALL.into_iter().flat_map(|w| {
        AtmosphericScenario::all()
            .into_iter()
            .map(move |s| LinkConfig::preset(w, s.id).unwrap())
    })
}

fn lengths(n: usize, max: f64) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| max * i as f64 / n as f64)
}

proptest! {
    #[test]
    fn transmittance_is_a_semigroup(alpha in 0.0..2.0f64, d1 in 0.0..20.0f64, d2 in 0.0..20.0f64) {
        let joint = transmittance(alpha, d1 + d2).unwrap();
        let split = transmittance(alpha, d1).unwrap() * transmittance(alpha, d2).unwrap();
        prop_assert!((joint - split).abs() <= 1e-14);
    }
}

#[test]
fn environment_outputs_are_probabilities() {
    for link in all_links() {
        for l in lengths(100, 50.0) {
            let cfg = link.with_length(l);
            let (pa, pb) = loss_probabilities(&cfg).unwrap();
            let (qa, qb) = depolarization_probabilities(&cfg).unwrap();
            let (ea, eb) = arm_efficiencies(&cfg).unwrap();
            for v in [pa, pb, qa, qb, ea, eb] {
                assert!(v.is_finite() && (0.0..=1.0).contains(&v), "{v} at L = {l}");
            }
            let y0 = noise_counts_y0(&cfg);
            assert!(y0.is_finite() && y0 >= 0.0);
        }
    }
}

#[test]
fn y0_rises_with_irradiance_and_ignores_water() {
    let y0 = |w, s| noise_counts_y0(&LinkConfig::preset(w, s).unwrap());
    for w in WaterKind::ALL {
        for s in 1..5 {
            assert!(y0(w, s + 1) > y0(w, s));
        }
    }
    for s in 1..=5 {
        assert_eq!(y0(WaterKind::Clear, s), y0(WaterKind::Turbid, s));
        assert_eq!(y0(WaterKind::Clear, s), y0(WaterKind::Coastal, s));
    }
}

#[test]
fn qber_non_decreasing_in_length() {
    for link in all_links() {
        for beta in [FRAC_PI_4, PI / 5.0] {
            let mut prev = 0.0;
            for l in lengths(400, 20.0) {
                let q = evaluate_link(&link.with_length(l), beta).unwrap().qber;
                assert!(q >= prev - 1e-12, "{link:?} beta={beta} L={l}");
                assert!((0.0..=0.5).contains(&q));
                prev = q;
            }
        }
    }
}

#[test]
fn qber_non_increasing_in_beta() {
    for link in all_links() {
        for l in [0.0, 0.3, 1.0, 2.5] {
            let cfg = link.with_length(l);
            let mut prev = f64::INFINITY;
            for i in 0..=50 {
                let beta = FRAC_PI_4 * i as f64 / 50.0;
                let q = evaluate_link(&cfg, beta).unwrap().qber;
                assert!(q <= prev + 1e-12, "L={l} beta={beta}");
                prev = q;
            }
        }
    }
}

#[test]
fn skr_vanishes_exactly_past_the_root() {
    let root = qber_root(0.5).unwrap();
    assert!((root - QBER_SECURITY_BOUND).abs() < 1e-3);
    for link in all_links() {
        for beta in [FRAC_PI_4, PI / 5.0] {
            for l in lengths(200, 5.0) {
                let r = evaluate_link(&link.with_length(l), beta).unwrap();
                if (r.qber - root).abs() < 1e-8 {
                    continue;
                }
                assert_eq!(r.skr == 0.0, r.qber >= root, "L={l} qber={}", r.qber);
                assert!(r.skr >= 0.0 && r.skr <= r.p_coincidence / 2.0);
            }
        }
    }
}

#[test]
fn long_link_approaches_random_guessing() {
    let cfg = LinkConfig::preset(WaterKind::Turbid, 5)
        .unwrap()
        .with_length(20.0);
    for beta in [FRAC_PI_4, PI / 5.0] {
        let r = evaluate_link(&cfg, beta).unwrap();
        assert!((r.qber - 0.5).abs() <= 1e-3, "{}", r.qber);
        assert_eq!(r.skr, 0.0);
    }
}
