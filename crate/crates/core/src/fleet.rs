//! Fleet composition: wind and solar into the intermittent share, and the
//! intermittent share into all power sources.
//!
//! The intermittent mixture weights the two source profiles by the wind
//! generation share `beta_w`; `gamma` is wind's share of the mixture
//! amplitude. Scaling to all power sources multiplies the amplitude by the
//! intermittent generation share `beta_ips` (dilution) while leaving the
//! normalized shape and every time coefficient untouched (inheritance).

use crate::error::{Error, Result};
use crate::mixture::MixtureProfile;
use crate::profile::{ExpDecayProfile, TimeAdvance};

/// Wind/solar profiles plus the two generation-share constants.
///
/// A profile may be absent only when its share is zero: no wind profile
/// requires `beta_w = 0`, no solar profile requires `beta_w = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetSpec {
    wind: Option<ExpDecayProfile>,
    solar: Option<ExpDecayProfile>,
    beta_w: f64,
    beta_ips: f64,
}

impl FleetSpec {
    pub fn new(
        wind: Option<ExpDecayProfile>,
        solar: Option<ExpDecayProfile>,
        beta_w: f64,
        beta_ips: f64,
    ) -> Result<Self> {
        check_proportion("beta_w", beta_w)?;
        check_proportion("beta_ips", beta_ips)?;
        if wind.is_none() && beta_w > 0.0 {
            return Err(Error::MissingProfile("wind"));
        }
        if solar.is_none() && beta_w < 1.0 {
            return Err(Error::MissingProfile("solar"));
        }
        Ok(Self {
            wind,
            solar,
            beta_w,
            beta_ips,
        })
    }

    pub fn wind(&self) -> Option<&ExpDecayProfile> {
        self.wind.as_ref()
    }

    pub fn solar(&self) -> Option<&ExpDecayProfile> {
        self.solar.as_ref()
    }

    pub fn beta_w(&self) -> f64 {
        self.beta_w
    }

    pub fn beta_ips(&self) -> f64 {
        self.beta_ips
    }
}

fn check_proportion(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(Error::ProportionOutOfRange { name, value });
    }
    Ok(())
}

/// Instantaneous generation by category, in MW.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSnapshot {
    wind_mw: f64,
    solar_mw: f64,
    controllable_mw: f64,
}

impl PowerSnapshot {
    pub fn new(wind_mw: f64, solar_mw: f64, controllable_mw: f64) -> Result<Self> {
        for value in [wind_mw, solar_mw, controllable_mw] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidPower(value));
            }
        }
        Ok(Self {
            wind_mw,
            solar_mw,
            controllable_mw,
        })
    }

    pub fn wind_mw(&self) -> f64 {
        self.wind_mw
    }

    pub fn solar_mw(&self) -> f64 {
        self.solar_mw
    }

    pub fn controllable_mw(&self) -> f64 {
        self.controllable_mw
    }
}

/// Wind share of intermittent generation. Errors when wind + solar is zero.
pub fn wind_share(snapshot: &PowerSnapshot) -> Result<f64> {
    let ips = snapshot.wind_mw + snapshot.solar_mw;
    if ips <= 0.0 {
        return Err(Error::ZeroIpsPower);
    }
    Ok(snapshot.wind_mw / ips)
}

/// Intermittent share of total generation. Errors when total is zero.
pub fn ips_share(snapshot: &PowerSnapshot) -> Result<f64> {
    let ips = snapshot.wind_mw + snapshot.solar_mw;
    let total = ips + snapshot.controllable_mw;
    if total <= 0.0 {
        return Err(Error::InvalidPower(0.0));
    }
    Ok(ips / total)
}

/// Both generation shares, `(beta_w, beta_ips)`.
pub fn derive_proportions(snapshot: &PowerSnapshot) -> Result<(f64, f64)> {
    Ok((wind_share(snapshot)?, ips_share(snapshot)?))
}

/// The intermittent mixture plus wind's share of its amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct IpsComposition {
    pub mixture: MixtureProfile,
    /// `gamma = beta_w * A_wind / A_ips`, in [0, 1].
    pub gamma: f64,
}

/// Weights the wind and solar profiles by their generation shares:
/// amplitude `beta_w * A_w + (1 - beta_w) * A_s`, components
/// `(gamma, tau_w)` and `(1 - gamma, tau_s)`.
pub fn compose_ips(spec: &FleetSpec) -> Result<IpsComposition> {
    let mut entries = Vec::new();
    if let Some(wind) = spec.wind() {
        entries.push((spec.beta_w(), *wind));
    }
    if let Some(solar) = spec.solar() {
        entries.push((1.0 - spec.beta_w(), *solar));
    }
    let mixture = MixtureProfile::from_weighted_profiles(&entries)?;
    let gamma = spec
        .wind()
        .map(|w| spec.beta_w() * w.amplitude_pct() / mixture.total_amplitude_pct())
        .unwrap_or(0.0);
    Ok(IpsComposition { mixture, gamma })
}

/// The constant-tau0 outer bound of a mixture as a single profile.
pub fn ips_contour(mixture: &MixtureProfile) -> ExpDecayProfile {
    ExpDecayProfile::new(
        mixture.total_amplitude_pct(),
        mixture.contour_tau0().hours(),
    )
    .expect("a valid mixture yields a valid contour profile")
}

/// All-power-sources uncertainty: the intermittent mixture scaled by its
/// generation share. `Zero` marks `beta_ips = 0`, where the uncertainty is
/// identically zero and no mixture exists.
#[derive(Debug, Clone, PartialEq)]
pub enum AllSourcesProfile {
    Zero,
    Mixture(MixtureProfile),
}

impl AllSourcesProfile {
    pub fn amplitude_pct(&self) -> f64 {
        match self {
            AllSourcesProfile::Zero => 0.0,
            AllSourcesProfile::Mixture(m) => m.total_amplitude_pct(),
        }
    }

    pub fn alpha_sum_pct(&self, t: TimeAdvance) -> f64 {
        match self {
            AllSourcesProfile::Zero => 0.0,
            AllSourcesProfile::Mixture(m) => m.alpha_sum_pct(t),
        }
    }

    pub fn contour_alpha_pct(&self, t: TimeAdvance) -> f64 {
        match self {
            AllSourcesProfile::Zero => 0.0,
            AllSourcesProfile::Mixture(m) => m.contour_alpha_pct(t),
        }
    }

    pub fn mixture(&self) -> Option<&MixtureProfile> {
        match self {
            AllSourcesProfile::Zero => None,
            AllSourcesProfile::Mixture(m) => Some(m),
        }
    }

    pub fn contour(&self) -> Option<ExpDecayProfile> {
        self.mixture().map(ips_contour)
    }
}

/// Scales a mixture's amplitude by `beta_ips`, keeping every component
/// weight and time coefficient.
pub fn compose_all_sources(mixture: &MixtureProfile, beta_ips: f64) -> Result<AllSourcesProfile> {
    check_proportion("beta_ips", beta_ips)?;
    if beta_ips == 0.0 {
        return Ok(AllSourcesProfile::Zero);
    }
    let scaled = MixtureProfile::from_components(
        beta_ips * mixture.total_amplitude_pct(),
        mixture.components().to_vec(),
    )?;
    Ok(AllSourcesProfile::Mixture(scaled))
}
