//! Weighted sums of exponential profiles and their envelopes.
//!
//! A mixture is a normalized weighted sum of single-source profiles sharing a
//! total amplitude `A`. Three views of it matter:
//!
//! * the sum itself, `lambda(t) = sum rho_i (1 - e^{-t/tau_i})`;
//! * the equivalent time coefficient `tau(t)`, the scale that makes a single
//!   exponential match the sum exactly at each `t` (monotone increasing from
//!   the harmonic mean `tau0` to `max tau_i`);
//! * the contour: the fixed-`tau0` exponential that bounds the sum from above,
//!   touching it at `t = 0` and asymptotically.
//!
//! [`MixtureProfile::max_deviation`] locates the widest gap between contour
//! and sum.

use crate::error::{Error, Result};
use crate::profile::{ExpDecayProfile, TimeAdvance, TimeCoefficient};

/// Tolerance on `sum(rho_i) - 1` accepted by [`MixtureProfile::from_components`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Weight and time coefficient of one mixture component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    /// Normalized amplitude share `rho`, in `(0, 1]`.
    pub weight: f64,
    pub time_coefficient: TimeCoefficient,
}

/// Normalized weighted sum of exponential profiles with a total amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureProfile {
    components: Vec<MixtureComponent>,
    total_amplitude_pct: f64,
}

/// Location and size of the widest gap between the contour and the sum.
///
/// `degenerate` marks mixtures whose components share a single time
/// coefficient: contour and sum coincide and the gap is identically zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationReport {
    pub t_star_h: f64,
    pub delta_lambda_star: f64,
    pub delta_alpha_star_pct: f64,
    pub degenerate: bool,
}

impl MixtureProfile {
    /// Builds a mixture from weighted profiles: total amplitude
    /// `A = sum w_i A_i`, component shares `rho_i = w_i A_i / A`.
    ///
    /// Entries with zero weighted amplitude are dropped. Errors if every
    /// entry drops out.
    pub fn from_weighted_profiles(entries: &[(f64, ExpDecayProfile)]) -> Result<Self> {
        for &(weight, _) in entries {
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidWeight(weight));
            }
        }
        let total: f64 = entries.iter().map(|(w, p)| w * p.amplitude_pct()).sum();
        if total <= 0.0 {
            return Err(Error::EmptyMixture);
        }
        let components = entries
            .iter()
            .filter(|(w, p)| w * p.amplitude_pct() > 0.0)
            .map(|(w, p)| MixtureComponent {
                weight: w * p.amplitude_pct() / total,
                time_coefficient: p.time_coefficient(),
            })
            .collect();
        Ok(Self {
            components,
            total_amplitude_pct: total,
        })
    }

    /// Plain (unit-weight) sum of profiles.
    pub fn from_profiles(profiles: &[ExpDecayProfile]) -> Result<Self> {
        let entries: Vec<(f64, ExpDecayProfile)> = profiles.iter().map(|p| (1.0, *p)).collect();
        Self::from_weighted_profiles(&entries)
    }

    /// The mixture holding exactly one profile.
    pub fn single(profile: &ExpDecayProfile) -> Self {
        Self {
            components: vec![MixtureComponent {
                weight: 1.0,
                time_coefficient: profile.time_coefficient(),
            }],
            total_amplitude_pct: profile.amplitude_pct(),
        }
    }

    /// Builds a mixture from already-normalized components.
    pub fn from_components(
        total_amplitude_pct: f64,
        components: Vec<MixtureComponent>,
    ) -> Result<Self> {
        if !total_amplitude_pct.is_finite() || total_amplitude_pct <= 0.0 {
            return Err(Error::InvalidAmplitude(total_amplitude_pct));
        }
        if components.is_empty() {
            return Err(Error::EmptyMixture);
        }
        for c in &components {
            if !c.weight.is_finite() || c.weight <= 0.0 {
                return Err(Error::InvalidWeight(c.weight));
            }
        }
        let sum: f64 = components.iter().map(|c| c.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::WeightsNotNormalized { sum });
        }
        Ok(Self {
            components,
            total_amplitude_pct,
        })
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn total_amplitude_pct(&self) -> f64 {
        self.total_amplitude_pct
    }

    /// Largest component time coefficient; the limit of `equivalent_tau`.
    pub fn max_tau(&self) -> TimeCoefficient {
        self.components.iter().map(|c| c.time_coefficient).fold(
            self.components[0].time_coefficient,
            |a, b| {
                if b.hours() > a.hours() {
                    b
                } else {
                    a
                }
            },
        )
    }

    /// True when every component shares one time coefficient; the contour
    /// then coincides with the sum.
    pub fn is_degenerate(&self) -> bool {
        let first = self.components[0].time_coefficient.hours();
        self.components
            .iter()
            .all(|c| c.time_coefficient.hours() == first)
    }

    /// `sum rho_i (1 - e^{-t/tau_i})`, in `[0, 1)`. Monotone increasing.
    pub fn lambda_sum(&self, t: TimeAdvance) -> f64 {
        self.components
            .iter()
            .map(|c| -c.weight * (-t.hours() / c.time_coefficient.hours()).exp_m1())
            .sum()
    }

    /// Total uncertainty in percent: `A * lambda_sum(t)`.
    pub fn alpha_sum_pct(&self, t: TimeAdvance) -> f64 {
        self.total_amplitude_pct * self.lambda_sum(t)
    }

    /// `sum rho_i e^{-t/tau_i}` = `1 - lambda_sum(t)`.
    fn survival(&self, t_h: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * (-t_h / c.time_coefficient.hours()).exp())
            .sum()
    }

    /// `ln(survival)`, stable for large `t` where the plain sum underflows.
    fn log_survival(&self, t_h: f64) -> f64 {
        let lam = self.lambda_sum(TimeAdvance::new(t_h).expect("valid advance"));
        if lam < 0.5 {
            return (-lam).ln_1p();
        }
        let max_exponent = self
            .components
            .iter()
            .map(|c| -t_h / c.time_coefficient.hours())
            .fold(f64::NEG_INFINITY, f64::max);
        let scaled: f64 = self
            .components
            .iter()
            .map(|c| c.weight * (-t_h / c.time_coefficient.hours() - max_exponent).exp())
            .sum();
        max_exponent + scaled.ln()
    }

    /// Contour time coefficient `tau0`: the weight-harmonic mean
    /// `(sum rho_i / tau_i)^-1`. Lies between the smallest and largest
    /// component time coefficient.
    pub fn contour_tau0(&self) -> TimeCoefficient {
        if self.components.len() == 1 {
            return self.components[0].time_coefficient;
        }
        let inverse: f64 = self
            .components
            .iter()
            .map(|c| c.weight / c.time_coefficient.hours())
            .sum();
        TimeCoefficient::new(1.0 / inverse).expect("harmonic mean of valid time coefficients")
    }

    /// Equivalent time coefficient `tau(t)`: solves
    /// `1 - e^{-t/tau(t)} = lambda_sum(t)`.
    ///
    /// Returns the closed-form `tau0` at `t = 0` (and for
    /// `t < 1e-9 * tau0`, where the log expression cancels catastrophically);
    /// monotone nondecreasing in `t`, converging to `max tau_i`.
    pub fn equivalent_tau(&self, t: TimeAdvance) -> TimeCoefficient {
        let tau0 = self.contour_tau0();
        let t_h = t.hours();
        if t_h < 1e-9 * tau0.hours() {
            return tau0;
        }
        TimeCoefficient::new(-t_h / self.log_survival(t_h))
            .expect("equivalent time coefficient of a valid mixture")
    }

    /// Contour value `1 - e^{-t/tau0}`; bounds `lambda_sum` from above.
    pub fn contour_lambda(&self, t: TimeAdvance) -> f64 {
        -(-t.hours() / self.contour_tau0().hours()).exp_m1()
    }

    /// Contour uncertainty in percent: `A * (1 - e^{-t/tau0})`.
    pub fn contour_alpha_pct(&self, t: TimeAdvance) -> f64 {
        self.total_amplitude_pct * self.contour_lambda(t)
    }

    /// Normalized gap between contour and sum:
    /// `delta(t) = sum rho_i e^{-t/tau_i} - e^{-t/tau0}`.
    ///
    /// Non-negative for every `t`, zero at `t = 0` and asymptotically.
    pub fn delta_lambda(&self, t: TimeAdvance) -> f64 {
        self.survival(t.hours()) - (-t.hours() / self.contour_tau0().hours()).exp()
    }

    /// First derivative of `delta_lambda`:
    /// `(1/tau0) e^{-t/tau0} - sum (rho_i/tau_i) e^{-t/tau_i}`.
    ///
    /// Zero at the maximum-deviation point.
    pub fn deviation_residual(&self, t: TimeAdvance) -> f64 {
        let tau0 = self.contour_tau0().hours();
        let t_h = t.hours();
        (-t_h / tau0).exp() / tau0
            - self
                .components
                .iter()
                .map(|c| {
                    let tau = c.time_coefficient.hours();
                    c.weight / tau * (-t_h / tau).exp()
                })
                .sum::<f64>()
    }

    /// `deviation_residual` with the slowest decay factored out; same sign
    /// and same zero, but free of underflow at large `t`.
    fn scaled_residual(&self, t_h: f64) -> f64 {
        let tau0 = self.contour_tau0().hours();
        let tau_max = self.max_tau().hours();
        (-t_h * (1.0 / tau0 - 1.0 / tau_max)).exp() / tau0
            - self
                .components
                .iter()
                .map(|c| {
                    let tau = c.time_coefficient.hours();
                    c.weight / tau * (-t_h * (1.0 / tau - 1.0 / tau_max)).exp()
                })
                .sum::<f64>()
    }

    /// Locates the maximum of `delta_lambda` over `t >= 0`.
    ///
    /// Golden-section maximization over `[0, 10 max tau_i]` seeds a bisection
    /// on the sign of the first derivative; the search window doubles when
    /// the maximizer sits on its right edge. Degenerate mixtures report a
    /// zero gap at `t = 0`.
    pub fn max_deviation(&self) -> DeviationReport {
        if self.is_degenerate() {
            return DeviationReport {
                t_star_h: 0.0,
                delta_lambda_star: 0.0,
                delta_alpha_star_pct: 0.0,
                degenerate: true,
            };
        }

        let tau_max = self.max_tau().hours();
        let mut hi = 10.0 * tau_max;
        let mut seed;
        loop {
            seed = golden_section_max(
                |t_h| self.delta_lambda(TimeAdvance::new(t_h).expect("grid point")),
                0.0,
                hi,
                1e-9,
            );
            if seed < hi - 1e-6 * tau_max || hi > 1e9 * tau_max {
                break;
            }
            hi *= 2.0;
        }

        let t_star_h = self.polish_root(seed, hi);
        let delta = self
            .delta_lambda(TimeAdvance::new(t_star_h).expect("root location"))
            .max(0.0);
        DeviationReport {
            t_star_h,
            delta_lambda_star: delta,
            delta_alpha_star_pct: self.total_amplitude_pct * delta,
            degenerate: false,
        }
    }

    /// Bisection on `scaled_residual` around `seed`; the derivative is
    /// positive below the maximum and negative above it.
    fn polish_root(&self, seed: f64, limit: f64) -> f64 {
        let tau_max = self.max_tau().hours();
        let start = if seed > 0.0 {
            seed
        } else {
            self.contour_tau0().hours()
        };

        let mut b = start;
        while self.scaled_residual(b) >= 0.0 {
            b *= 2.0;
            if b > 1e12 * tau_max {
                return seed.min(limit);
            }
        }
        let mut a = b / 2.0;
        while self.scaled_residual(a) <= 0.0 {
            a /= 2.0;
            if a < f64::MIN_POSITIVE {
                return seed.min(limit);
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.scaled_residual(mid) > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    while b - a > tol {
        if f1 > f2 {
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
