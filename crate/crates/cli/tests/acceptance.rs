//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test -p ipsuq-cli --test acceptance -- --nocapture`).
//!
//! Reference values: wind 31.86%/2.67 h, solar 41.90%/0.89 h, beta_w = 0.8,
//! beta_ips = 0.6.

use std::panic::UnwindSafe;
use std::path::Path;
use std::time::{Duration, Instant};

use ipsuq_cli::pipeline;
use ipsuq_core::mixture::{MixtureComponent, MixtureProfile};
use ipsuq_core::profile::{conservation_residual, TimeCoefficient};
use ipsuq_core::{
    fit_profile, AmplitudeMode, ExpDecayProfile, FitMode, FitOptions, RmsePoint, RmseSequence,
    TimeAdvance,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn criterion<F: FnOnce() + UnwindSafe>(number: u32, summary: &str, check: F) {
    let outcome = std::panic::catch_unwind(check);
    let verdict = if outcome.is_ok() { "PASS" } else { "FAIL" };
    println!("acceptance: criterion {number} {verdict} - {summary}");
    if let Err(payload) = outcome {
        std::panic::resume_unwind(payload);
    }
}

fn t(hours: f64) -> TimeAdvance {
    TimeAdvance::new(hours).unwrap()
}

const SECTION5_CONFIG: &str = "\
[wind]
amplitude_pct = 31.86
tau_h = 2.67

[solar]
amplitude_pct = 41.90
tau_h = 0.89

[fleet]
beta_w = 0.8
beta_ips = 0.6
";

fn section5_fleet(dir: &Path) -> pipeline::ComposedFleet {
    let config = dir.join("fleet.toml");
    std::fs::write(&config, SECTION5_CONFIG).unwrap();
    pipeline::compose_from_config(&config).unwrap()
}

/// Shares 0.8 on tau=4 h and 0.2 on tau=2 h.
fn two_scale_mixture() -> MixtureProfile {
    MixtureProfile::from_profiles(&[
        ExpDecayProfile::new(8.0, 4.0).unwrap(),
        ExpDecayProfile::new(2.0, 2.0).unwrap(),
    ])
    .unwrap()
}

fn random_mixture(rng: &mut StdRng) -> MixtureProfile {
    let n = rng.random_range(1..=5usize);
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let components = raw
        .iter()
        .map(|w| MixtureComponent {
            weight: w / total,
            time_coefficient: TimeCoefficient::new(rng.random_range(0.1..50.0)).unwrap(),
        })
        .collect();
    MixtureProfile::from_components(rng.random_range(1.0..60.0), components).unwrap()
}

#[test]
fn criterion_1_reference_composition() {
    criterion(1, "composition reports A_ips, gamma and tau0", || {
        let start = Instant::now();
        let dir = tempfile::tempdir().unwrap();
        let fleet = section5_fleet(dir.path());

        let a_ips = fleet.composition.mixture.total_amplitude_pct();
        let gamma = fleet.composition.gamma;
        let tau0 = fleet.contour.tau_hours();
        assert!((a_ips - 33.87).abs() <= 0.005, "A_ips = {a_ips}");
        assert!((gamma - 0.7526).abs() <= 0.0005, "gamma = {gamma}");
        assert!((tau0 - 1.79).abs() <= 0.01, "tau0 = {tau0}");
        assert!(start.elapsed() < Duration::from_secs(1));
    });
}

#[test]
fn criterion_2_maximum_deviation() {
    criterion(2, "max deviation matches the 1e-3 grid scan", || {
        let start = Instant::now();
        let dir = tempfile::tempdir().unwrap();
        let fleet = section5_fleet(dir.path());
        let mixture = &fleet.composition.mixture;

        let report = mixture.max_deviation();
        assert!(
            (report.delta_alpha_star_pct - 2.24).abs() <= 0.10,
            "delta_alpha_star = {}",
            report.delta_alpha_star_pct
        );

        // independent brute-force scan, step 1e-3 h over [0, 10 max tau]
        let hi = 10.0 * mixture.max_tau().hours();
        let steps = (hi / 1e-3).ceil() as usize;
        let mut grid_t = 0.0;
        let mut grid_gap = f64::NEG_INFINITY;
        for i in 0..=steps {
            let hours = i as f64 * 1e-3;
            let gap = mixture.delta_lambda(t(hours));
            if gap > grid_gap {
                grid_gap = gap;
                grid_t = hours;
            }
        }
        assert!(
            (report.t_star_h - grid_t).abs() <= 1e-3,
            "solver t* = {} vs grid {grid_t}",
            report.t_star_h
        );
        assert!(start.elapsed() < Duration::from_secs(1));
    });
}

#[test]
fn criterion_3_all_sources_dilution() {
    criterion(
        3,
        "dilution scales the amplitude, not the contour scale",
        || {
            let start = Instant::now();
            let dir = tempfile::tempdir().unwrap();
            let fleet = section5_fleet(dir.path());

            let a_g = fleet.all_sources.amplitude_pct();
            assert!((a_g - 20.32).abs() <= 0.005, "A_g = {a_g}");
            let contour = fleet.all_sources.contour().unwrap();
            assert_eq!(contour.tau_hours(), fleet.contour.tau_hours());
            assert!((contour.tau_hours() - 1.79).abs() <= 0.01);
            assert!(start.elapsed() < Duration::from_secs(1));
        },
    );
}

#[test]
fn criterion_4_equivalent_tau_example() {
    criterion(4, "equivalent tau: start, limit and monotonicity", || {
        let mixture = two_scale_mixture();
        let tau_max = mixture.max_tau().hours();

        let tau0 = mixture.equivalent_tau(TimeAdvance::ZERO).hours();
        assert!((tau0 - 3.33).abs() <= 0.005, "tau(0) = {tau0}");

        // 1000x the largest time coefficient stands in for the infinite
        // limit
        let far = mixture.equivalent_tau(t(1000.0 * tau_max)).hours();
        assert!((3.999..=4.0).contains(&far), "tau at the far point = {far}");

        let mut previous = f64::NEG_INFINITY;
        for i in 0..10_000 {
            let hours = i as f64 * (1000.0 * tau_max) / 9_999.0;
            let value = mixture.equivalent_tau(t(hours)).hours();
            assert!(value + 1e-10 >= previous, "tau(t) decreased at t = {hours}");
            previous = value;
        }
    });
}

#[test]
fn criterion_5_property_suites() {
    criterion(5, "conservation, equivalence, monotonicity, bounds", || {
        let start = Instant::now();

        // conservation identity, orders 1..=5 on 100 random (tau, t)
        let mut rng = StdRng::seed_from_u64(0xacce_0001);
        for _ in 0..100 {
            let tau = TimeCoefficient::new(rng.random_range(0.5..10.0)).unwrap();
            let advance = t(rng.random_range(0.0..5.0 * tau.hours()));
            for order in 1..=5 {
                let residual = conservation_residual(tau, advance, order).unwrap();
                assert!(residual.abs() <= 1e-12, "conservation residual {residual}");
            }
        }

        // equivalence, monotonicity, boundaries and nonnegativity on 1000
        // random mixtures x 100 advances
        let mut rng = StdRng::seed_from_u64(0xacce_0002);
        for _ in 0..1000 {
            let mixture = random_mixture(&mut rng);
            let tau_max = mixture.max_tau().hours();

            assert_eq!(
                mixture.equivalent_tau(TimeAdvance::ZERO).hours(),
                mixture.contour_tau0().hours(),
                "tau(0) must be the harmonic mean exactly"
            );

            let mut advances: Vec<f64> = (0..100)
                .map(|_| {
                    let log = rng.random_range((1e-4f64).ln()..(50.0 * tau_max).ln());
                    log.exp()
                })
                .collect();
            advances.sort_by(f64::total_cmp);

            let mut previous = f64::NEG_INFINITY;
            for &hours in &advances {
                let tau_t = mixture.equivalent_tau(t(hours)).hours();
                let matched = -(-hours / tau_t).exp_m1();
                assert!(
                    (matched - mixture.lambda_sum(t(hours))).abs() <= 1e-12,
                    "equivalence broken at t = {hours}"
                );
                assert!(
                    tau_t + 1e-10 >= previous,
                    "monotonicity broken at t = {hours}"
                );
                previous = tau_t;
                assert!(mixture.delta_lambda(t(hours)) >= -1e-14);
            }

            // far boundary: sandwiched convergence to max tau
            let big_t = 1000.0 * tau_max;
            let far = mixture.equivalent_tau(t(big_t)).hours();
            let rho_max: f64 = mixture
                .components()
                .iter()
                .filter(|c| c.time_coefficient.hours() == tau_max)
                .map(|c| c.weight)
                .sum();
            let lower = tau_max / (1.0 + tau_max * (-rho_max.ln()) / big_t);
            assert!(far <= tau_max + 1e-12);
            assert!(far >= lower - 1e-12);
            if tau_max * (-rho_max.ln()) <= 0.9 {
                assert!((far - tau_max).abs() <= 1e-3);
            }
        }

        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    });
}

#[test]
fn criterion_6_fitting_oracle() {
    criterion(
        6,
        "max-slope and least-squares fits on exact samples",
        || {
            let truth = ExpDecayProfile::new(10.0, 2.0).unwrap();
            let sequence = |step: f64| {
                let n = (24.0 / step).round() as usize;
                RmseSequence::from_points(
                    (1..=n)
                        .map(|i| RmsePoint {
                            time_advance_h: i as f64 * step,
                            rmse_pct: truth.alpha_pct(t(i as f64 * step)),
                        })
                        .collect(),
                )
                .unwrap()
            };

            // hourly grid: the discrete forward-difference slope biases tau to
            // step/(1 - e^{-step/tau})
            let fitted = fit_profile(&sequence(1.0), &FitOptions::default()).unwrap();
            assert!(
                (fitted.tau_hours() - 2.5415).abs() <= 1e-4,
                "hourly tau_hat = {}",
                fitted.tau_hours()
            );
            let closed_form = 1.0 / -(-0.5f64).exp_m1();
            assert!((fitted.tau_hours() - closed_form).abs() <= 1e-4);

            // the bias vanishes as the grid refines
            let fine = fit_profile(&sequence(0.01), &FitOptions::default()).unwrap();
            assert!(
                (fine.tau_hours() - 2.0).abs() / 2.0 <= 0.005,
                "fine-grid tau_hat = {}",
                fine.tau_hours()
            );

            // least squares recovers the exact parameters
            let options = FitOptions {
                fit_mode: FitMode::LeastSquares,
                amplitude_mode: AmplitudeMode::Max,
                actual_power_floor_mw: 0.0,
            };
            let lsq = fit_profile(&sequence(1.0), &options).unwrap();
            assert!((lsq.amplitude_pct() - 10.0).abs() / 10.0 <= 1e-6);
            assert!((lsq.tau_hours() - 2.0).abs() / 2.0 <= 1e-6);
        },
    );
}

fn parse_field(output: &str, key: &str) -> f64 {
    output
        .lines()
        .find_map(|line| line.trim().strip_prefix(key))
        .unwrap_or_else(|| panic!("missing '{key}' in output:\n{output}"))
        .trim()
        .parse()
        .expect("numeric field")
}

#[test]
fn criterion_7_synthetic_round_trip() {
    criterion(
        7,
        "synth then least-squares fit recovers the profile",
        || {
            let start = Instant::now();
            let dir = tempfile::tempdir().unwrap();
            let samples = dir.path().join("samples.csv");

            for seed in 0..20u64 {
                let out = std::process::Command::new(env!("CARGO_BIN_EXE_ipsuq"))
                    .args([
                        "synth",
                        "--amp",
                        "31.86",
                        "--tau",
                        "2.67",
                        "--samples-per-advance",
                        "10000",
                        "--seed",
                        &seed.to_string(),
                        "--out",
                        samples.to_str().unwrap(),
                    ])
                    .output()
                    .expect("synth runs");
                assert!(
                    out.status.success(),
                    "{}",
                    String::from_utf8_lossy(&out.stderr)
                );

                let out = std::process::Command::new(env!("CARGO_BIN_EXE_ipsuq"))
                    .args([
                        "fit",
                        "--samples",
                        samples.to_str().unwrap(),
                        "--fit-mode",
                        "lsq",
                    ])
                    .output()
                    .expect("fit runs");
                assert!(
                    out.status.success(),
                    "{}",
                    String::from_utf8_lossy(&out.stderr)
                );

                let text = String::from_utf8_lossy(&out.stdout).into_owned();
                let amplitude = parse_field(&text, "amplitude_pct:");
                let tau = parse_field(&text, "tau_h:");
                assert!(
                    (amplitude - 31.86).abs() / 31.86 <= 0.03,
                    "seed {seed}: amplitude {amplitude}"
                );
                assert!((tau - 2.67).abs() / 2.67 <= 0.03, "seed {seed}: tau {tau}");
            }

            let elapsed = start.elapsed();
            assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
        },
    );
}
