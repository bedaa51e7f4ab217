//! Scenario resolution and report assembly shared by the subcommands.

use std::path::{Path, PathBuf};

use ipsuq_core::error::Result;
use ipsuq_core::fitting::{
    coverage_check, fit_profile, AmplitudeMode, CoverageViolation, FitMode, FitOptions,
    ForecastSample, RmseSequence,
};
use ipsuq_core::fleet::{self, AllSourcesProfile, FleetSpec, IpsComposition};
use ipsuq_core::io::{
    self, AllSourcesReport, CurveColumn, CurveRefs, DeviationSection, FleetScenario, IpsReport,
    ProfileReport, Quantity, ReportDocument, ReportInputs, SourceConfig, SourceEcho,
    ViolationReport,
};
use ipsuq_core::mixture::DeviationReport;
use ipsuq_core::profile::{ExpDecayProfile, TimeAdvance};

/// A source profile plus how it was obtained.
#[derive(Debug, Clone)]
pub struct ResolvedSource {
    pub name: &'static str,
    pub profile: ExpDecayProfile,
    /// "given", "paper" or "least_squares".
    pub fit_mode: String,
    pub excluded_samples: usize,
    pub violations: Vec<CoverageViolation>,
    pub samples_path: Option<PathBuf>,
}

/// Everything the composition subcommands report on.
#[derive(Debug, Clone)]
pub struct ComposedFleet {
    pub scenario: FleetScenario,
    pub sources: Vec<ResolvedSource>,
    pub composition: IpsComposition,
    pub contour: ExpDecayProfile,
    pub deviation: DeviationReport,
    pub all_sources: AllSourcesProfile,
}

pub fn fit_mode_label(mode: FitMode) -> &'static str {
    match mode {
        FitMode::MaxSlope => "paper",
        FitMode::LeastSquares => "least_squares",
    }
}

pub fn amplitude_mode_label(mode: AmplitudeMode) -> &'static str {
    match mode {
        AmplitudeMode::Max => "max",
        AmplitudeMode::At24h => "at_24h",
    }
}

/// Distinct positive advances present in a sample set, ascending.
pub fn distinct_advances(samples: &[ForecastSample]) -> Vec<f64> {
    let mut advances: Vec<f64> = samples
        .iter()
        .map(|s| s.time_advance().hours())
        .filter(|&t| t > 0.0)
        .collect();
    advances.sort_by(f64::total_cmp);
    advances.dedup();
    advances
}

/// Parses the config at `path` and resolves it into a composed fleet;
/// sample paths are taken relative to the config file.
pub fn compose_from_config(path: &Path) -> Result<ComposedFleet> {
    let scenario = io::parse_fleet_config(path)?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    compose_scenario(scenario, base_dir)
}

pub fn compose_scenario(scenario: FleetScenario, base_dir: &Path) -> Result<ComposedFleet> {
    let mut sources = Vec::new();
    let wind = resolve_source(
        "wind",
        &scenario.wind,
        &scenario.fit,
        base_dir,
        &mut sources,
    )?;
    let solar = resolve_source(
        "solar",
        &scenario.solar,
        &scenario.fit,
        base_dir,
        &mut sources,
    )?;

    let spec = FleetSpec::new(wind, solar, scenario.beta_w, scenario.beta_ips)?;
    let composition = fleet::compose_ips(&spec)?;
    let contour = fleet::ips_contour(&composition.mixture);
    let deviation = composition.mixture.max_deviation();
    let all_sources = fleet::compose_all_sources(&composition.mixture, scenario.beta_ips)?;

    Ok(ComposedFleet {
        scenario,
        sources,
        composition,
        contour,
        deviation,
        all_sources,
    })
}

fn resolve_source(
    name: &'static str,
    config: &Option<SourceConfig>,
    fit: &FitOptions,
    base_dir: &Path,
    resolved: &mut Vec<ResolvedSource>,
) -> Result<Option<ExpDecayProfile>> {
    let Some(config) = config else {
        return Ok(None);
    };
    let source = match config {
        SourceConfig::Profile(profile) => ResolvedSource {
            name,
            profile: *profile,
            fit_mode: "given".into(),
            excluded_samples: 0,
            violations: Vec::new(),
            samples_path: None,
        },
        SourceConfig::FitFromSamples(path) => {
            let full = if path.is_absolute() {
                path.clone()
            } else {
                base_dir.join(path)
            };
            let (profile, excluded, violations) = fit_from_samples(&full, fit)?;
            ResolvedSource {
                name,
                profile,
                fit_mode: fit_mode_label(fit.fit_mode).into(),
                excluded_samples: excluded,
                violations,
                samples_path: Some(full),
            }
        }
    };
    let profile = source.profile;
    resolved.push(source);
    Ok(Some(profile))
}

/// Reads a sample file, bins it on its own distinct advances, fits a
/// profile, and runs the coverage diagnostic.
pub fn fit_from_samples(
    path: &Path,
    fit: &FitOptions,
) -> Result<(ExpDecayProfile, usize, Vec<CoverageViolation>)> {
    let samples = io::parse_samples(path)?;
    let advances = distinct_advances(&samples);
    let (sequence, excluded) =
        RmseSequence::from_samples(&samples, &advances, fit.actual_power_floor_mw)?;
    let profile = fit_profile(&sequence, fit)?;
    let violations = coverage_check(&sequence, &profile);
    Ok((profile, excluded, violations))
}

fn source_echo(config: &Option<SourceConfig>) -> Option<SourceEcho> {
    config.as_ref().map(|source| match source {
        SourceConfig::Profile(p) => SourceEcho {
            amplitude: Some(Quantity::percent(p.amplitude_pct())),
            time_coefficient: Some(Quantity::hours(p.tau_hours())),
            samples: None,
        },
        SourceConfig::FitFromSamples(path) => SourceEcho {
            amplitude: None,
            time_coefficient: None,
            samples: Some(path.display().to_string()),
        },
    })
}

/// Assembles the report document; `curve_table` is the emitted curve CSV,
/// when one exists.
pub fn build_report(fleet: &ComposedFleet, curve_table: Option<String>) -> ReportDocument {
    let scenario = &fleet.scenario;
    let inputs = ReportInputs {
        beta_w: Quantity::dimensionless(scenario.beta_w),
        beta_ips: Quantity::dimensionless(scenario.beta_ips),
        wind: source_echo(&scenario.wind),
        solar: source_echo(&scenario.solar),
        fit_mode: fit_mode_label(scenario.fit.fit_mode).into(),
        amplitude_mode: amplitude_mode_label(scenario.fit.amplitude_mode).into(),
        actual_power_floor: Quantity::megawatts(scenario.fit.actual_power_floor_mw),
    };

    let fitted_profiles = fleet
        .sources
        .iter()
        .map(|s| ProfileReport {
            source: s.name.into(),
            amplitude: Quantity::percent(s.profile.amplitude_pct()),
            time_coefficient: Quantity::hours(s.profile.tau_hours()),
            fit_mode: s.fit_mode.clone(),
            excluded_samples: s.excluded_samples,
            coverage_violations: s
                .violations
                .iter()
                .map(|v| ViolationReport {
                    time_advance: Quantity::hours(v.time_advance_h),
                    observed_rmse: Quantity::percent(v.rmse_pct),
                    fitted: Quantity::percent(v.fitted_pct),
                })
                .collect(),
        })
        .collect();

    let ips = IpsReport {
        amplitude: Quantity::percent(fleet.composition.mixture.total_amplitude_pct()),
        gamma: Quantity::dimensionless(fleet.composition.gamma),
        contour_time_coefficient: Quantity::hours(fleet.contour.tau_hours()),
        max_deviation: DeviationSection {
            t_star: Quantity::hours(fleet.deviation.t_star_h),
            delta_lambda_star: Quantity::dimensionless(fleet.deviation.delta_lambda_star),
            delta_alpha_star: Quantity::percent(fleet.deviation.delta_alpha_star_pct),
            degenerate: fleet.deviation.degenerate,
        },
    };

    let all_sources = AllSourcesReport {
        beta_ips: Quantity::dimensionless(scenario.beta_ips),
        amplitude: Quantity::percent(fleet.all_sources.amplitude_pct()),
        contour_time_coefficient: fleet
            .all_sources
            .contour()
            .map(|c| Quantity::hours(c.tau_hours())),
        note: matches!(fleet.all_sources, AllSourcesProfile::Zero)
            .then(|| "beta_ips = 0: all-sources uncertainty is identically zero".to_string()),
    };

    ReportDocument {
        inputs,
        fitted_profiles,
        ips,
        all_sources,
        curves: CurveRefs { curve_table },
    }
}

/// Samples every available curve on the grid: per-source profiles, the
/// mixture sum and contour, the all-sources contour, and the equivalent
/// time coefficient.
pub fn curve_columns(fleet: &ComposedFleet, grid: &[f64]) -> Vec<CurveColumn> {
    let advances: Vec<TimeAdvance> = grid
        .iter()
        .map(|&h| TimeAdvance::new(h).expect("validated grid"))
        .collect();
    let mut columns = Vec::new();

    for source in &fleet.sources {
        let name = match source.name {
            "wind" => "alpha_w",
            _ => "alpha_s",
        };
        columns.push(CurveColumn {
            name: name.into(),
            values: advances
                .iter()
                .map(|&t| source.profile.alpha_pct(t))
                .collect(),
        });
    }
    let mixture = &fleet.composition.mixture;
    columns.push(CurveColumn {
        name: "alpha_ips_sum".into(),
        values: advances.iter().map(|&t| mixture.alpha_sum_pct(t)).collect(),
    });
    columns.push(CurveColumn {
        name: "alpha_ips_contour".into(),
        values: advances
            .iter()
            .map(|&t| mixture.contour_alpha_pct(t))
            .collect(),
    });
    columns.push(CurveColumn {
        name: "alpha_g_contour".into(),
        values: advances
            .iter()
            .map(|&t| fleet.all_sources.contour_alpha_pct(t))
            .collect(),
    });
    columns.push(CurveColumn {
        name: "tau_equiv".into(),
        values: advances
            .iter()
            .map(|&t| mixture.equivalent_tau(t).hours())
            .collect(),
    });
    columns
}
