//! Single-source forecast-error profiles.
//!
//! The uncertainty of one intermittent source is the saturating exponential
//! `alpha(t) = A * (1 - e^{-t/tau})`: RMSE of the relative forecast error (in
//! percent of actual power) as a function of the time advance `t` (hours).
//! `A` is the asymptotic error level, `tau` the e-folding scale. The
//! normalized form `lambda(t) = alpha(t) / A` and its analytic derivatives
//! satisfy the conservation identity `tau * lambda^(i) + lambda^(i-1) = [i=1]`,
//! exposed here as a residual for verification.

use crate::error::{Error, Result};

/// Forecast time advance in hours. Non-negative and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TimeAdvance(f64);

impl TimeAdvance {
    pub const ZERO: TimeAdvance = TimeAdvance(0.0);

    pub fn new(hours: f64) -> Result<Self> {
        if !hours.is_finite() || hours < 0.0 {
            return Err(Error::InvalidTimeAdvance(hours));
        }
        Ok(TimeAdvance(hours))
    }

    pub fn hours(self) -> f64 {
        self.0
    }
}

/// e-folding scale of the uncertainty decay, in hours. Positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TimeCoefficient(f64);

impl TimeCoefficient {
    pub fn new(hours: f64) -> Result<Self> {
        if !hours.is_finite() || hours <= 0.0 {
            return Err(Error::InvalidTimeCoefficient(hours));
        }
        Ok(TimeCoefficient(hours))
    }

    pub fn hours(self) -> f64 {
        self.0
    }
}

/// A single source's statistical forecast-error function.
///
/// `amplitude_pct` is the asymptotic relative-error RMSE in percent of actual
/// power; the time coefficient is the e-folding scale in hours. Both are
/// strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpDecayProfile {
    amplitude_pct: f64,
    time_coefficient: TimeCoefficient,
}

impl ExpDecayProfile {
    pub fn new(amplitude_pct: f64, tau_hours: f64) -> Result<Self> {
        if !amplitude_pct.is_finite() || amplitude_pct <= 0.0 {
            return Err(Error::InvalidAmplitude(amplitude_pct));
        }
        Ok(Self {
            amplitude_pct,
            time_coefficient: TimeCoefficient::new(tau_hours)?,
        })
    }

    pub fn amplitude_pct(&self) -> f64 {
        self.amplitude_pct
    }

    pub fn time_coefficient(&self) -> TimeCoefficient {
        self.time_coefficient
    }

    pub fn tau_hours(&self) -> f64 {
        self.time_coefficient.hours()
    }

    /// Forecast-error RMSE in percent at time advance `t`.
    ///
    /// Strictly increasing in `t`, zero at `t = 0`, and below the amplitude
    /// for every finite `t`.
    pub fn alpha_pct(&self, t: TimeAdvance) -> f64 {
        self.amplitude_pct * lambda(self.time_coefficient, t)
    }

    /// Normalized value `alpha(t) / A`, in `[0, 1)`.
    pub fn lambda(&self, t: TimeAdvance) -> f64 {
        lambda(self.time_coefficient, t)
    }
}

/// Normalized profile `lambda(t) = 1 - e^{-t/tau}`, in `[0, 1)`.
pub fn lambda(tau: TimeCoefficient, t: TimeAdvance) -> f64 {
    -(-t.hours() / tau.hours()).exp_m1()
}

/// `order`-th analytic derivative of `lambda`:
/// `(-1)^{order-1} tau^{-order} e^{-t/tau}`.
///
/// `order` 0 is rejected; use [`lambda`] for the function itself.
pub fn lambda_derivative(tau: TimeCoefficient, t: TimeAdvance, order: u32) -> Result<f64> {
    if order == 0 {
        return Err(Error::DerivativeOrderZero);
    }
    let tau_h = tau.hours();
    let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign * tau_h.powi(-(order as i32)) * (-t.hours() / tau_h).exp())
}

/// Residual of the conservation identity
/// `tau * lambda^(order) + lambda^(order-1) - target`, where the target is 1
/// for order 1 and 0 for order >= 2. Zero (to rounding) for the analytic
/// derivatives.
pub fn conservation_residual(tau: TimeCoefficient, t: TimeAdvance, order: u32) -> Result<f64> {
    if order == 0 {
        return Err(Error::DerivativeOrderZero);
    }
    let (previous, target) = if order == 1 {
        (lambda(tau, t), 1.0)
    } else {
        (lambda_derivative(tau, t, order - 1)?, 0.0)
    };
    Ok(tau.hours() * lambda_derivative(tau, t, order)? + previous - target)
}
