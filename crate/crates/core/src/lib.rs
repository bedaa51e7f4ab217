//! Statistical quantification of intermittent-power forecast uncertainty.
//!
//! The forecast error of a wind or solar source, aggregated over many
//! observations, follows a saturating exponential in the forecast time
//! advance: near zero for very short advances, rising to an asymptotic RMSE
//! level. This crate models that curve ([`profile`]), composes several
//! sources into fleet-level mixtures with an equivalent time coefficient and
//! a fixed-coefficient upper bound ([`mixture`], [`fleet`]), fits curve
//! parameters from raw forecast/actual samples ([`fitting`]), and defines
//! the file formats tying it together ([`io`], [`synth`]).

pub mod error;
pub mod fitting;
pub mod fleet;
pub mod io;
pub mod mixture;
pub mod profile;
pub mod synth;

pub use error::{Error, Result};
pub use fitting::{
    coverage_check, fit_profile, relative_error_pct, AmplitudeMode, CoverageViolation, FitMode,
    FitOptions, ForecastSample, RmsePoint, RmseSequence,
};
pub use fleet::{
    compose_all_sources, compose_ips, derive_proportions, ips_contour, AllSourcesProfile,
    FleetSpec, IpsComposition, PowerSnapshot,
};
pub use mixture::{DeviationReport, MixtureComponent, MixtureProfile};
pub use profile::{ExpDecayProfile, TimeAdvance, TimeCoefficient};
pub use synth::SynthSpec;
