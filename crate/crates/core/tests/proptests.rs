//! Randomized invariants via proptest.

use ipsuq_core::mixture::{MixtureComponent, MixtureProfile};
use ipsuq_core::profile::{conservation_residual, ExpDecayProfile, TimeAdvance, TimeCoefficient};
use ipsuq_core::{compose_all_sources, fleet};
use proptest::prelude::*;

fn t(hours: f64) -> TimeAdvance {
    TimeAdvance::new(hours).unwrap()
}

prop_compose! {
    fn arb_profile()(amplitude in 0.5f64..60.0, tau in 0.1f64..50.0) -> ExpDecayProfile {
        ExpDecayProfile::new(amplitude, tau).unwrap()
    }
}

prop_compose! {
    fn arb_mixture()(
        total in 1.0f64..60.0,
        raw in prop::collection::vec((0.05f64..1.0, 0.1f64..50.0), 1..=5),
    ) -> MixtureProfile {
        let weight_sum: f64 = raw.iter().map(|(w, _)| w).sum();
        let components = raw
            .iter()
            .map(|&(w, tau)| MixtureComponent {
                weight: w / weight_sum,
                time_coefficient: TimeCoefficient::new(tau).unwrap(),
            })
            .collect();
        MixtureProfile::from_components(total, components).unwrap()
    }
}

proptest! {
    #[test]
    fn alpha_is_monotone_and_bounded(
        profile in arb_profile(),
        t1 in 0.0f64..100.0,
        gap in 1e-6f64..100.0,
    ) {
        let lo = profile.alpha_pct(t(t1));
        let hi = profile.alpha_pct(t(t1 + gap));
        prop_assert!(lo < hi || hi == profile.amplitude_pct());
        prop_assert!(lo >= 0.0);
        prop_assert!(hi <= profile.amplitude_pct());
    }

    #[test]
    fn conservation_residual_is_tiny(
        tau in 0.5f64..10.0,
        scale in 0.0f64..5.0,
        order in 1u32..=5,
    ) {
        let tc = TimeCoefficient::new(tau).unwrap();
        let residual = conservation_residual(tc, t(scale * tau), order).unwrap();
        prop_assert!(residual.abs() <= 1e-12);
    }

    #[test]
    fn mixture_sum_stays_normalized(mixture in arb_mixture(), hours in 0.0f64..500.0) {
        let lambda = mixture.lambda_sum(t(hours));
        prop_assert!((0.0..=1.0).contains(&lambda));
        prop_assert!(mixture.delta_lambda(t(hours)) >= -1e-14);
        prop_assert!(
            mixture.contour_alpha_pct(t(hours)) >= mixture.alpha_sum_pct(t(hours)) - 1e-12
        );
    }

    #[test]
    fn equivalent_tau_reproduces_the_sum(mixture in arb_mixture(), hours in 1e-6f64..500.0) {
        let tau_t = mixture.equivalent_tau(t(hours)).hours();
        let matched = -(-hours / tau_t).exp_m1();
        prop_assert!((matched - mixture.lambda_sum(t(hours))).abs() <= 1e-12);
    }

    #[test]
    fn dilution_scales_and_inherits(
        mixture in arb_mixture(),
        beta in 0.01f64..=1.0,
        hours in 0.0f64..200.0,
    ) {
        let scaled = compose_all_sources(&mixture, beta).unwrap();
        let m = scaled.mixture().unwrap();
        // inheritance is exact: same components, same normalized shape
        prop_assert_eq!(m.components(), mixture.components());
        prop_assert_eq!(m.lambda_sum(t(hours)), mixture.lambda_sum(t(hours)));
        prop_assert_eq!(
            m.equivalent_tau(t(hours)).hours(),
            mixture.equivalent_tau(t(hours)).hours()
        );
        // dilution is exact up to rounding
        let direct = beta * mixture.alpha_sum_pct(t(hours));
        let via = m.alpha_sum_pct(t(hours));
        prop_assert!((via - direct).abs() <= 4.0 * f64::EPSILON * direct.abs() + 1e-300);
    }

    #[test]
    fn ips_composition_matches_direct_evaluation(
        wind in arb_profile(),
        solar in arb_profile(),
        beta_w in 0.0f64..=1.0,
        beta_ips in 0.0f64..=1.0,
        hours in 0.0f64..100.0,
    ) {
        let spec = fleet::FleetSpec::new(Some(wind), Some(solar), beta_w, beta_ips).unwrap();
        prop_assume!(beta_w > 0.0 || beta_w < 1.0);
        let composition = match fleet::compose_ips(&spec) {
            Ok(c) => c,
            // beta_w at an endpoint with a dropped component cannot happen
            // here because both profiles have positive amplitude
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let direct = beta_w * wind.alpha_pct(t(hours)) + (1.0 - beta_w) * solar.alpha_pct(t(hours));
        let via = composition.mixture.alpha_sum_pct(t(hours));
        prop_assert!((via - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        // gamma decomposition of the normalized sum
        let gamma = composition.gamma;
        prop_assert!((0.0..=1.0).contains(&gamma));
        let decomposed = gamma * wind.lambda(t(hours)) + (1.0 - gamma) * solar.lambda(t(hours));
        prop_assert!((composition.mixture.lambda_sum(t(hours)) - decomposed).abs() <= 1e-12);
    }
}
