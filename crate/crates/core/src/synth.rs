//! Seeded synthetic forecast-sample generator.
//!
//! For each requested advance `t`, relative errors are drawn from a zero-mean
//! normal with standard deviation `alpha(t)`, so the expected RMSE at `t`
//! equals the ground-truth profile value and the profile is recoverable by
//! fitting. Output is fully determined by the seed.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::fitting::ForecastSample;
use crate::profile::{ExpDecayProfile, TimeAdvance};

/// Ground truth and sampling plan for a synthetic data set.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    profile: ExpDecayProfile,
    samples_per_advance: usize,
    advances: Vec<f64>,
    base_actual_mw: f64,
    rng_seed: u64,
}

impl SynthSpec {
    pub fn new(
        profile: ExpDecayProfile,
        samples_per_advance: usize,
        advances: Vec<f64>,
        base_actual_mw: f64,
        rng_seed: u64,
    ) -> Result<Self> {
        if samples_per_advance == 0 {
            return Err(Error::InvalidSynthSpec("samples_per_advance must be >= 1"));
        }
        if advances.is_empty() {
            return Err(Error::InvalidSynthSpec("advances must be nonempty"));
        }
        if advances.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(Error::InvalidSynthSpec(
                "advances must be positive and finite",
            ));
        }
        if !base_actual_mw.is_finite() || base_actual_mw <= 0.0 {
            return Err(Error::InvalidSynthSpec("base_actual_mw must be positive"));
        }
        Ok(Self {
            profile,
            samples_per_advance,
            advances,
            base_actual_mw,
            rng_seed,
        })
    }

    pub fn profile(&self) -> &ExpDecayProfile {
        &self.profile
    }

    pub fn advances(&self) -> &[f64] {
        &self.advances
    }

    pub fn samples_per_advance(&self) -> usize {
        self.samples_per_advance
    }
}

/// Draws the full sample set. Actual power is the constant base; forecast
/// power is `base * (1 + error/100)`, floored at zero so extreme draws stay
/// representable.
pub fn generate(spec: &SynthSpec) -> Vec<ForecastSample> {
    let mut rng = ChaCha12Rng::seed_from_u64(spec.rng_seed);
    let mut samples = Vec::with_capacity(spec.advances.len() * spec.samples_per_advance);
    for &advance in &spec.advances {
        let t = TimeAdvance::new(advance).expect("validated advance");
        let sigma = spec.profile.alpha_pct(t);
        let noise = Normal::new(0.0, sigma).expect("positive sigma");
        for _ in 0..spec.samples_per_advance {
            let error_pct: f64 = noise.sample(&mut rng);
            let forecast = (spec.base_actual_mw * (1.0 + error_pct / 100.0)).max(0.0);
            samples.push(
                ForecastSample::new("synth", t, forecast, spec.base_actual_mw)
                    .expect("generated sample is valid"),
            );
        }
    }
    samples
}
