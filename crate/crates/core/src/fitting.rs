//! RMSE sequences from forecast samples, and profile fitting.
//!
//! Samples are binned by time advance; each bin's root-mean-square relative
//! error (percent of actual power) gives one point of the empirical RMSE
//! curve. A profile is fitted either by the amplitude/time-coefficient
//! conditions (amplitude = max RMSE, tau = amplitude / max forward-difference
//! slope) or, as an alternative, by bounded least squares.

use crate::error::{Error, Result};
use crate::profile::{ExpDecayProfile, TimeAdvance};

/// Samples match a requested advance when within this many hours of it.
const BIN_TOLERANCE_H: f64 = 1e-9;

/// Points above the fitted curve by more than this slack count as
/// coverage violations.
const COVERAGE_SLACK: f64 = 1e-9;

/// One (time advance, forecast power, actual power) observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSample {
    sample_id: String,
    time_advance: TimeAdvance,
    forecast_mw: f64,
    actual_mw: f64,
}

impl ForecastSample {
    pub fn new(
        sample_id: impl Into<String>,
        time_advance: TimeAdvance,
        forecast_mw: f64,
        actual_mw: f64,
    ) -> Result<Self> {
        for value in [forecast_mw, actual_mw] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidPower(value));
            }
        }
        Ok(Self {
            sample_id: sample_id.into(),
            time_advance,
            forecast_mw,
            actual_mw,
        })
    }

    pub fn sample_id(&self) -> &str {
        &self.sample_id
    }

    pub fn time_advance(&self) -> TimeAdvance {
        self.time_advance
    }

    pub fn forecast_mw(&self) -> f64 {
        self.forecast_mw
    }

    pub fn actual_mw(&self) -> f64 {
        self.actual_mw
    }
}

/// Signed relative forecast error in percent,
/// `100 * (forecast - actual) / actual`, or `None` when the sample is
/// excluded because its actual power is at or below `floor_mw`.
pub fn relative_error_pct(sample: &ForecastSample, floor_mw: f64) -> Option<f64> {
    if sample.actual_mw <= floor_mw {
        return None;
    }
    Some(100.0 * (sample.forecast_mw - sample.actual_mw) / sample.actual_mw)
}

/// One point of the empirical RMSE curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsePoint {
    pub time_advance_h: f64,
    pub rmse_pct: f64,
}

/// Ordered (time advance, RMSE) sequence with the origin pinned at (0, 0).
#[derive(Debug, Clone, PartialEq)]
pub struct RmseSequence {
    points: Vec<RmsePoint>,
}

impl RmseSequence {
    /// Builds a sequence from points at positive advances; (0, 0) is
    /// prepended.
    pub fn from_points(points: Vec<RmsePoint>) -> Result<Self> {
        let mut previous = 0.0;
        for p in &points {
            if !p.time_advance_h.is_finite() || p.time_advance_h <= previous {
                return Err(Error::NonIncreasingAdvances);
            }
            if !p.rmse_pct.is_finite() || p.rmse_pct < 0.0 {
                return Err(Error::InvalidRmse(p.rmse_pct));
            }
            previous = p.time_advance_h;
        }
        let mut all = Vec::with_capacity(points.len() + 1);
        all.push(RmsePoint {
            time_advance_h: 0.0,
            rmse_pct: 0.0,
        });
        all.extend(points);
        Ok(Self { points: all })
    }

    /// Bins samples at the requested advances and takes the root mean square
    /// of the relative errors in each bin. Returns the sequence and the
    /// number of samples excluded by the actual-power floor.
    ///
    /// Advances must be positive and strictly increasing; an advance whose
    /// bin holds no usable sample is an error. Bin sums use compensated
    /// summation, so the result does not depend on sample order beyond
    /// rounding.
    pub fn from_samples(
        samples: &[ForecastSample],
        advances: &[f64],
        floor_mw: f64,
    ) -> Result<(Self, usize)> {
        let mut previous = 0.0;
        for &a in advances {
            if !a.is_finite() || a <= previous {
                return Err(Error::InvalidAdvance(a));
            }
            previous = a;
        }
        if advances.is_empty() {
            return Err(Error::SequenceTooShort(0));
        }

        let mut excluded = 0usize;
        let mut points = Vec::with_capacity(advances.len());
        for &advance in advances {
            let mut sum = NeumaierSum::default();
            let mut count = 0usize;
            for sample in samples {
                if (sample.time_advance.hours() - advance).abs() > BIN_TOLERANCE_H {
                    continue;
                }
                match relative_error_pct(sample, floor_mw) {
                    Some(error) => {
                        sum.add(error * error);
                        count += 1;
                    }
                    None => excluded += 1,
                }
            }
            if count == 0 {
                return Err(Error::EmptyBin(advance));
            }
            points.push(RmsePoint {
                time_advance_h: advance,
                rmse_pct: (sum.total() / count as f64).sqrt(),
            });
        }
        Ok((Self::from_points(points)?, excluded))
    }

    /// All points including the pinned origin.
    pub fn points(&self) -> &[RmsePoint] {
        &self.points
    }

    pub fn max_rmse_pct(&self) -> f64 {
        self.points.iter().map(|p| p.rmse_pct).fold(0.0, f64::max)
    }
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// How the amplitude is read off the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeMode {
    /// Largest RMSE value in the sequence.
    Max,
    /// The RMSE at t = 24 h (day-ahead level stands in for the asymptote).
    At24h,
}

/// Parameter estimation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMode {
    /// Amplitude per [`AmplitudeMode`]; tau = amplitude divided by the
    /// largest forward-difference slope of the sequence.
    MaxSlope,
    /// Bounded least squares over amplitude in (0, 2 max RMSE] and tau in
    /// (0, 10 max t].
    LeastSquares,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub amplitude_mode: AmplitudeMode,
    pub actual_power_floor_mw: f64,
    pub fit_mode: FitMode,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            amplitude_mode: AmplitudeMode::Max,
            actual_power_floor_mw: 0.0,
            fit_mode: FitMode::MaxSlope,
        }
    }
}

/// Fits a profile to an RMSE sequence.
///
/// Needs at least two points beyond the origin. The max-slope mode errors
/// when the sequence never increases; the `At24h` amplitude mode errors when
/// no point sits at t = 24 h.
pub fn fit_profile(seq: &RmseSequence, opts: &FitOptions) -> Result<ExpDecayProfile> {
    let points = seq.points();
    if points.len() < 3 {
        return Err(Error::SequenceTooShort(points.len() - 1));
    }
    match opts.fit_mode {
        FitMode::MaxSlope => {
            let amplitude = match opts.amplitude_mode {
                AmplitudeMode::Max => seq.max_rmse_pct(),
                AmplitudeMode::At24h => {
                    points
                        .iter()
                        .find(|p| (p.time_advance_h - 24.0).abs() <= BIN_TOLERANCE_H)
                        .ok_or(Error::MissingDayAheadPoint)?
                        .rmse_pct
                }
            };
            let max_slope = points
                .windows(2)
                .map(|w| {
                    (w[1].rmse_pct - w[0].rmse_pct) / (w[1].time_advance_h - w[0].time_advance_h)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            if max_slope <= 0.0 {
                return Err(Error::SequenceNotIncreasing);
            }
            ExpDecayProfile::new(amplitude, amplitude / max_slope)
        }
        FitMode::LeastSquares => least_squares_fit(points),
    }
}

/// Least-squares fit by projecting out the amplitude: for a fixed tau the
/// optimal amplitude is closed-form, leaving a one-dimensional search over
/// tau (coarse log grid, then golden-section refinement to 1e-9).
fn least_squares_fit(points: &[RmsePoint]) -> Result<ExpDecayProfile> {
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.time_advance_h > 0.0)
        .map(|p| (p.time_advance_h, p.rmse_pct))
        .collect();
    let max_rmse = data.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    if max_rmse <= 0.0 {
        return Err(Error::SequenceNotIncreasing);
    }
    let max_t = data.iter().map(|&(t, _)| t).fold(0.0, f64::max);
    let amplitude_cap = 2.0 * max_rmse;

    let amplitude_for = |tau: f64| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for &(t, r) in &data {
            let lam = -(-t / tau).exp_m1();
            num += r * lam;
            den += lam * lam;
        }
        (num / den).min(amplitude_cap)
    };
    let sse_for = |tau: f64| -> f64 {
        let a = amplitude_for(tau);
        data.iter()
            .map(|&(t, r)| {
                let residual = a * -(-t / tau).exp_m1() - r;
                residual * residual
            })
            .sum()
    };

    // coarse log-spaced scan over (0, 10 max t]
    const GRID: usize = 400;
    let lo = max_t * 1e-5;
    let hi = max_t * 10.0;
    let ratio = (hi / lo).ln() / (GRID - 1) as f64;
    let mut best_index = 0;
    let mut best_sse = f64::INFINITY;
    for i in 0..GRID {
        let tau = lo * (ratio * i as f64).exp();
        let sse = sse_for(tau);
        if sse < best_sse {
            best_sse = sse;
            best_index = i;
        }
    }
    let bracket_lo = lo * (ratio * best_index.saturating_sub(1) as f64).exp();
    let bracket_hi = lo * (ratio * (best_index + 1).min(GRID - 1) as f64).exp();

    let tau = golden_section_min(sse_for, bracket_lo, bracket_hi, 1e-9);
    ExpDecayProfile::new(amplitude_for(tau), tau)
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// A sequence point lying above the fitted curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageViolation {
    pub time_advance_h: f64,
    pub rmse_pct: f64,
    pub fitted_pct: f64,
}

/// Lists every sequence point strictly above the fitted curve by more than
/// 1e-9. An empty list means the profile is an outer envelope of the
/// sequence.
pub fn coverage_check(seq: &RmseSequence, profile: &ExpDecayProfile) -> Vec<CoverageViolation> {
    seq.points()
        .iter()
        .filter_map(|p| {
            let fitted =
                profile.alpha_pct(TimeAdvance::new(p.time_advance_h).expect("sequence advance"));
            (p.rmse_pct > fitted + COVERAGE_SLACK).then_some(CoverageViolation {
                time_advance_h: p.time_advance_h,
                rmse_pct: p.rmse_pct,
                fitted_pct: fitted,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(t_h: f64, forecast: f64, actual: f64) -> ForecastSample {
        ForecastSample::new("s", TimeAdvance::new(t_h).unwrap(), forecast, actual).unwrap()
    }

    fn seq(points: &[(f64, f64)]) -> RmseSequence {
        RmseSequence::from_points(
            points
                .iter()
                .map(|&(t, r)| RmsePoint {
                    time_advance_h: t,
                    rmse_pct: r,
                })
                .collect(),
        )
        .unwrap()
    }

    /// Sequence sampled exactly from amplitude 10, tau 2 on `step`-spaced
    /// advances up to 24 h.
    fn exact_sequence(step: f64) -> RmseSequence {
        let profile = ExpDecayProfile::new(10.0, 2.0).unwrap();
        let n = (24.0 / step).round() as usize;
        RmseSequence::from_points(
            (1..=n)
                .map(|i| {
                    let t = i as f64 * step;
                    RmsePoint {
                        time_advance_h: t,
                        rmse_pct: profile.alpha_pct(TimeAdvance::new(t).unwrap()),
                    }
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn relative_error_values() {
        assert_eq!(
            relative_error_pct(&sample(1.0, 110.0, 100.0), 0.0),
            Some(10.0)
        );
        assert_eq!(
            relative_error_pct(&sample(1.0, 100.0, 100.0), 0.0),
            Some(0.0)
        );
        assert_eq!(relative_error_pct(&sample(1.0, 50.0, 0.0), 0.0), None);
        assert_eq!(relative_error_pct(&sample(1.0, 90.0, 5.0), 5.0), None);
    }

    #[test]
    fn sample_validation() {
        assert!(ForecastSample::new("s", TimeAdvance::new(1.0).unwrap(), -1.0, 10.0).is_err());
        assert!(ForecastSample::new("s", TimeAdvance::new(1.0).unwrap(), 1.0, f64::NAN).is_err());
        assert!(TimeAdvance::new(-1.0).is_err());
    }

    #[test]
    fn rmse_sequence_from_samples() {
        // 3% and 4% errors at t=1, a single -5% at t=2
        let samples = vec![
            sample(1.0, 103.0, 100.0),
            sample(1.0, 104.0, 100.0),
            sample(2.0, 95.0, 100.0),
        ];
        let (seq, excluded) = RmseSequence::from_samples(&samples, &[1.0, 2.0], 0.0).unwrap();
        assert_eq!(excluded, 0);
        let points = seq.points();
        assert_eq!(
            points[0],
            RmsePoint {
                time_advance_h: 0.0,
                rmse_pct: 0.0
            }
        );
        assert_relative_eq!(points[1].rmse_pct, 3.5355339059327378, max_relative = 1e-12);
        assert_relative_eq!(points[2].rmse_pct, 5.0, max_relative = 1e-12);
    }

    #[test]
    fn empty_bin_is_an_error() {
        let samples = vec![sample(1.0, 103.0, 100.0)];
        let err = RmseSequence::from_samples(&samples, &[1.0, 3.0], 0.0);
        assert!(matches!(err, Err(Error::EmptyBin(t)) if t == 3.0));
        // a bin emptied by the floor also errors
        let err = RmseSequence::from_samples(&samples, &[1.0], 200.0);
        assert!(matches!(err, Err(Error::EmptyBin(_))));
    }

    #[test]
    fn floor_exclusions_are_counted() {
        let samples = vec![
            sample(1.0, 103.0, 100.0),
            sample(1.0, 50.0, 1.0),
            sample(1.0, 10.0, 0.0),
        ];
        let (seq, excluded) = RmseSequence::from_samples(&samples, &[1.0], 2.0).unwrap();
        assert_eq!(excluded, 2);
        assert_relative_eq!(seq.points()[1].rmse_pct, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn sample_order_does_not_change_the_sequence() {
        let mut samples: Vec<ForecastSample> = (0..500)
            .map(|i| sample(1.0, 100.0 + (i % 17) as f64 - 8.0, 100.0))
            .collect();
        let (forward, _) = RmseSequence::from_samples(&samples, &[1.0], 0.0).unwrap();
        samples.reverse();
        let (reversed, _) = RmseSequence::from_samples(&samples, &[1.0], 0.0).unwrap();
        assert!((forward.points()[1].rmse_pct - reversed.points()[1].rmse_pct).abs() <= 1e-12);
    }

    #[test]
    fn invalid_advances_are_rejected() {
        let samples = vec![sample(1.0, 103.0, 100.0)];
        assert!(matches!(
            RmseSequence::from_samples(&samples, &[1.0, 1.0], 0.0),
            Err(Error::InvalidAdvance(_))
        ));
        assert!(matches!(
            RmseSequence::from_samples(&samples, &[-1.0], 0.0),
            Err(Error::InvalidAdvance(_))
        ));
    }

    #[test]
    fn max_slope_fit_hand_sequences() {
        let p = fit_profile(
            &seq(&[(1.0, 5.0), (2.0, 8.0), (3.0, 9.0)]),
            &FitOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(p.amplitude_pct(), 9.0);
        assert_relative_eq!(p.tau_hours(), 1.8, max_relative = 1e-12);

        let p = fit_profile(&seq(&[(1.0, 9.0), (2.0, 9.0)]), &FitOptions::default()).unwrap();
        assert_relative_eq!(p.amplitude_pct(), 9.0);
        assert_relative_eq!(p.tau_hours(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn max_slope_fit_on_exact_hourly_samples() {
        let p = fit_profile(&exact_sequence(1.0), &FitOptions::default()).unwrap();
        assert_relative_eq!(p.amplitude_pct(), 9.999938557876467, max_relative = 1e-12);
        assert_relative_eq!(p.tau_hours(), 2.5414784670574605, max_relative = 1e-9);
    }

    #[test]
    fn discrete_slope_bias_shrinks_with_the_grid() {
        // tau_hat tracks step/(1 - e^{-step/tau}) and falls toward tau
        let mut previous = f64::INFINITY;
        for step in [1.0, 0.5, 0.1, 0.01] {
            let p = fit_profile(&exact_sequence(step), &FitOptions::default()).unwrap();
            let predicted = step / -(-step / 2.0f64).exp_m1();
            assert_relative_eq!(p.tau_hours(), predicted, max_relative = 1e-5);
            assert!(p.tau_hours() < previous);
            assert!(p.tau_hours() > 2.0);
            previous = p.tau_hours();
        }
        assert!((previous - 2.0) / 2.0 < 0.005);
    }

    #[test]
    fn amplitude_at_24h_mode() {
        let options = FitOptions {
            amplitude_mode: AmplitudeMode::At24h,
            ..FitOptions::default()
        };
        // max sits beyond t=24; the day-ahead value is smaller
        let s = seq(&[(1.0, 5.0), (24.0, 6.0), (25.0, 7.0)]);
        let p = fit_profile(&s, &options).unwrap();
        assert_relative_eq!(p.amplitude_pct(), 6.0);
        assert_relative_eq!(p.tau_hours(), 6.0 / 5.0, max_relative = 1e-12);

        let missing = seq(&[(1.0, 5.0), (2.0, 6.0)]);
        assert!(matches!(
            fit_profile(&missing, &options),
            Err(Error::MissingDayAheadPoint)
        ));
    }

    #[test]
    fn fit_error_paths() {
        assert!(matches!(
            fit_profile(&seq(&[(3.0, 5.0)]), &FitOptions::default()),
            Err(Error::SequenceTooShort(1))
        ));
        assert!(matches!(
            fit_profile(&seq(&[(1.0, 0.0), (2.0, 0.0)]), &FitOptions::default()),
            Err(Error::SequenceNotIncreasing)
        ));
    }

    #[test]
    fn least_squares_recovers_noiseless_parameters() {
        let options = FitOptions {
            fit_mode: FitMode::LeastSquares,
            ..FitOptions::default()
        };
        let p = fit_profile(&exact_sequence(1.0), &options).unwrap();
        assert_relative_eq!(p.amplitude_pct(), 10.0, max_relative = 1e-6);
        assert_relative_eq!(p.tau_hours(), 2.0, max_relative = 1e-6);
    }

    #[test]
    fn coverage_of_exact_sequence_under_max_slope_fit() {
        // the discrete-slope bias (tau_hat > tau) puts the fitted curve
        // below every positive-advance point of an exactly exponential
        // sequence
        let s = exact_sequence(1.0);
        let p = fit_profile(&s, &FitOptions::default()).unwrap();
        let violations = coverage_check(&s, &p);
        assert_eq!(violations.len(), 24);
        assert_relative_eq!(violations[0].time_advance_h, 1.0);
        assert_relative_eq!(
            violations[0].rmse_pct,
            3.9346934028736658,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            violations[0].fitted_pct,
            3.2528762877980293,
            max_relative = 1e-9
        );
    }

    #[test]
    fn coverage_reports_points_above_the_curve() {
        let s = seq(&[(1.0, 8.0), (2.0, 9.0)]);
        let p = ExpDecayProfile::new(9.0, 3.0).unwrap();
        let violations = coverage_check(&s, &p);
        assert_eq!(violations.len(), 2);
        assert_relative_eq!(violations[0].time_advance_h, 1.0);
        assert_relative_eq!(
            violations[0].fitted_pct,
            2.5512182048358966,
            max_relative = 1e-12
        );
        // no point can exceed the max-mode amplitude itself
        assert!(violations.iter().all(|v| v.rmse_pct <= 9.0));
    }

    #[test]
    fn coverage_is_empty_for_a_dominating_profile() {
        let s = seq(&[(1.0, 3.0), (2.0, 5.0), (3.0, 6.0)]);
        let p = ExpDecayProfile::new(9.0, 0.5).unwrap();
        assert!(coverage_check(&s, &p).is_empty());
    }
}
