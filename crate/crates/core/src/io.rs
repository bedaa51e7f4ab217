//! On-disk formats: sample CSV, fleet configuration, curve tables, and the
//! composition report.
//!
//! Byte-level contract for all files: UTF-8, LF line endings, '.' decimal
//! separator, mandatory header rows.
//!
//! * Samples: CSV with columns `source_id,time_advance_h,forecast_mw,
//!   actual_mw` plus an optional informational `timestamp`.
//! * Fleet scenario: a TOML document with `[wind]`, `[solar]`, `[fleet]` and
//!   optional `[fit]` tables. Sources carry either `amplitude_pct`/`tau_h`
//!   or a `samples` path to fit from.
//! * Curve table: CSV with a leading `t_h` column and one column per curve,
//!   written at full precision.
//! * Report: JSON; every numeric field carries its unit.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, RowError};
use crate::fitting::{AmplitudeMode, FitMode, FitOptions, ForecastSample};
use crate::profile::{ExpDecayProfile, TimeAdvance};

pub const SAMPLE_HEADER: [&str; 4] = ["source_id", "time_advance_h", "forecast_mw", "actual_mw"];
pub const DEFAULT_T_MAX_H: f64 = 24.0;
pub const DEFAULT_T_STEP_H: f64 = 0.05;

// ---------------------------------------------------------------------------
// sample CSV

/// Reads samples from a CSV file. Malformed rows are collected into one
/// error listing every offending row number.
pub fn parse_samples(path: &Path) -> Result<Vec<ForecastSample>> {
    let file = File::open(path).map_err(|source| Error::ReadFile {
        path: path.to_path_buf(),
        source,
    })?;
    parse_samples_from_reader(BufReader::new(file))
}

pub fn parse_samples_from_reader<R: Read>(reader: R) -> Result<Vec<ForecastSample>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = csv_reader.headers()?.clone();
    let header_fields: Vec<&str> = headers.iter().collect();
    let valid_header = (header_fields.len() == 4 || header_fields.len() == 5)
        && header_fields[..4] == SAMPLE_HEADER
        && header_fields.get(4).is_none_or(|&f| f == "timestamp");
    if !valid_header {
        return Err(Error::SampleHeader {
            found: header_fields.join(","),
        });
    }

    let mut samples = Vec::new();
    let mut bad_rows = Vec::new();
    for (index, record) in csv_reader.records().enumerate() {
        let row = index + 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                bad_rows.push(RowError {
                    row,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        match parse_sample_record(&record, header_fields.len()) {
            Ok(sample) => samples.push(sample),
            Err(reason) => bad_rows.push(RowError { row, reason }),
        }
    }
    if !bad_rows.is_empty() {
        return Err(Error::MalformedSamples { rows: bad_rows });
    }
    Ok(samples)
}

fn parse_sample_record(
    record: &csv::StringRecord,
    header_len: usize,
) -> std::result::Result<ForecastSample, String> {
    if record.len() != 4 && record.len() != header_len {
        return Err(format!(
            "expected {header_len} fields, got {}",
            record.len()
        ));
    }
    let source_id = record.get(0).unwrap_or_default().to_string();
    let numeric = |index: usize, name: &str| -> std::result::Result<f64, String> {
        let raw = record.get(index).unwrap_or_default();
        raw.parse::<f64>()
            .map_err(|_| format!("invalid {name}: '{raw}'"))
    };
    let time_advance_h = numeric(1, "time_advance_h")?;
    let forecast_mw = numeric(2, "forecast_mw")?;
    let actual_mw = numeric(3, "actual_mw")?;

    if time_advance_h < 0.0 {
        return Err("negative time advance".to_string());
    }
    let advance = TimeAdvance::new(time_advance_h)
        .map_err(|_| format!("invalid time_advance_h: '{time_advance_h}'"))?;
    for (name, value) in [("forecast_mw", forecast_mw), ("actual_mw", actual_mw)] {
        if !value.is_finite() || value < 0.0 {
            return Err(format!("negative or non-finite {name}: '{value}'"));
        }
    }
    ForecastSample::new(source_id, advance, forecast_mw, actual_mw).map_err(|e| e.to_string())
}

/// Writes samples in the 4-column format, full precision, LF endings.
pub fn write_samples(path: &Path, samples: &[ForecastSample]) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::WriteFile {
        path: path.to_path_buf(),
        source,
    })?;
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    writer.write_record(SAMPLE_HEADER)?;
    for s in samples {
        writer.write_record([
            s.sample_id(),
            &s.time_advance().hours().to_string(),
            &s.forecast_mw().to_string(),
            &s.actual_mw().to_string(),
        ])?;
    }
    writer.flush().map_err(|source| Error::WriteFile {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

// ---------------------------------------------------------------------------
// fleet configuration

/// A source in a fleet scenario: a profile given outright, or samples to
/// fit one from.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceConfig {
    Profile(ExpDecayProfile),
    FitFromSamples(PathBuf),
}

/// A parsed and validated fleet scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetScenario {
    pub wind: Option<SourceConfig>,
    pub solar: Option<SourceConfig>,
    pub beta_w: f64,
    pub beta_ips: f64,
    pub fit: FitOptions,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    wind: Option<RawSource>,
    solar: Option<RawSource>,
    fleet: RawFleet,
    fit: Option<RawFit>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau_h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFleet {
    beta_w: f64,
    beta_ips: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFit {
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    actual_power_floor_mw: Option<f64>,
}

fn config_error(reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        reason: reason.into(),
    }
}

pub fn parse_fleet_config(path: &Path) -> Result<FleetScenario> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::ReadFile {
        path: path.to_path_buf(),
        source,
    })?;
    parse_fleet_config_str(&text)
}

pub fn parse_fleet_config_str(text: &str) -> Result<FleetScenario> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| config_error(e.to_string()))?;

    let proportion = |name: &str, value: f64| -> Result<f64> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(config_error(format!(
                "fleet.{name} must lie within [0, 1], got {value}"
            )));
        }
        Ok(value)
    };
    let beta_w = proportion("beta_w", raw.fleet.beta_w)?;
    let beta_ips = proportion("beta_ips", raw.fleet.beta_ips)?;

    let wind = raw.wind.map(|s| validate_source("wind", s)).transpose()?;
    let solar = raw.solar.map(|s| validate_source("solar", s)).transpose()?;
    if wind.is_none() && beta_w > 0.0 {
        return Err(config_error(
            "missing [wind] section while fleet.beta_w > 0",
        ));
    }
    if solar.is_none() && beta_w < 1.0 {
        return Err(config_error(
            "missing [solar] section while fleet.beta_w < 1",
        ));
    }

    let fit = validate_fit(raw.fit.unwrap_or_default())?;
    Ok(FleetScenario {
        wind,
        solar,
        beta_w,
        beta_ips,
        fit,
    })
}

fn validate_source(section: &str, raw: RawSource) -> Result<SourceConfig> {
    match (raw.amplitude_pct, raw.tau_h, raw.samples) {
        (Some(amplitude), Some(tau), None) => ExpDecayProfile::new(amplitude, tau)
            .map(SourceConfig::Profile)
            .map_err(|e| config_error(format!("{section}: {e}"))),
        (None, None, Some(samples)) => Ok(SourceConfig::FitFromSamples(PathBuf::from(samples))),
        _ => Err(config_error(format!(
            "{section}: give either amplitude_pct with tau_h, or samples"
        ))),
    }
}

fn validate_fit(raw: RawFit) -> Result<FitOptions> {
    let mut options = FitOptions::default();
    if let Some(mode) = raw.mode {
        options.fit_mode = match mode.as_str() {
            "paper" => FitMode::MaxSlope,
            "least_squares" | "lsq" => FitMode::LeastSquares,
            other => {
                return Err(config_error(format!(
                    "fit.mode must be 'paper' or 'least_squares', got '{other}'"
                )))
            }
        };
    }
    if let Some(amplitude) = raw.amplitude {
        options.amplitude_mode = match amplitude.as_str() {
            "max" => AmplitudeMode::Max,
            "at_24h" | "at24" => AmplitudeMode::At24h,
            other => {
                return Err(config_error(format!(
                    "fit.amplitude must be 'max' or 'at_24h', got '{other}'"
                )))
            }
        };
    }
    if let Some(floor) = raw.actual_power_floor_mw {
        if !floor.is_finite() || floor < 0.0 {
            return Err(config_error(format!(
                "fit.actual_power_floor_mw must be >= 0, got {floor}"
            )));
        }
        options.actual_power_floor_mw = floor;
    }
    Ok(options)
}

/// Decimal text at 12 significant digits; round-trips through
/// [`parse_fleet_config`] unchanged.
fn sig12(value: f64) -> String {
    format!("{value:.11e}")
}

/// Serializes a scenario. Numeric values are written at 12 significant
/// digits, so a parse of the output reproduces them bit-for-bit at that
/// precision.
pub fn write_fleet_config(path: &Path, scenario: &FleetScenario) -> Result<()> {
    let text = fleet_config_to_string(scenario);
    std::fs::write(path, text).map_err(|source| Error::WriteFile {
        path: path.to_path_buf(),
        source,
    })
}

pub fn fleet_config_to_string(scenario: &FleetScenario) -> String {
    let mut out = String::new();
    let mut source_section = |name: &str, source: &Option<SourceConfig>| {
        if let Some(source) = source {
            out.push_str(&format!("[{name}]\n"));
            match source {
                SourceConfig::Profile(p) => {
                    out.push_str(&format!("amplitude_pct = {}\n", sig12(p.amplitude_pct())));
                    out.push_str(&format!("tau_h = {}\n", sig12(p.tau_hours())));
                }
                SourceConfig::FitFromSamples(path) => {
                    out.push_str(&format!("samples = {:?}\n", path.display().to_string()));
                }
            }
            out.push('\n');
        }
    };
    source_section("wind", &scenario.wind);
    source_section("solar", &scenario.solar);

    out.push_str("[fleet]\n");
    out.push_str(&format!("beta_w = {}\n", sig12(scenario.beta_w)));
    out.push_str(&format!("beta_ips = {}\n\n", sig12(scenario.beta_ips)));

    out.push_str("[fit]\n");
    let mode = match scenario.fit.fit_mode {
        FitMode::MaxSlope => "paper",
        FitMode::LeastSquares => "least_squares",
    };
    let amplitude = match scenario.fit.amplitude_mode {
        AmplitudeMode::Max => "max",
        AmplitudeMode::At24h => "at_24h",
    };
    out.push_str(&format!("mode = \"{mode}\"\n"));
    out.push_str(&format!("amplitude = \"{amplitude}\"\n"));
    out.push_str(&format!(
        "actual_power_floor_mw = {}\n",
        sig12(scenario.fit.actual_power_floor_mw)
    ));
    out
}

// ---------------------------------------------------------------------------
// curve tables

/// One named curve sampled on the shared time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveColumn {
    pub name: String,
    pub values: Vec<f64>,
}

/// Uniform grid `0, step, 2 step, ...` up to and including `t_max` (within
/// rounding).
pub fn time_grid(t_max_h: f64, step_h: f64) -> Result<Vec<f64>> {
    if !t_max_h.is_finite() || !step_h.is_finite() || t_max_h <= 0.0 || step_h <= 0.0 {
        return Err(Error::InvalidGrid);
    }
    let n = (t_max_h / step_h + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| i as f64 * step_h).collect())
}

/// Writes `t_h` plus one column per curve, full precision.
pub fn write_curve_table<W: Write>(
    writer: W,
    t_grid: &[f64],
    columns: &[CurveColumn],
) -> Result<()> {
    if t_grid.is_empty() || t_grid[0] < 0.0 {
        return Err(Error::InvalidGrid);
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid);
    }
    assert!(
        columns.iter().all(|c| c.values.len() == t_grid.len()),
        "every curve column must match the grid length"
    );

    let mut csv_writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let mut header = vec!["t_h".to_string()];
    header.extend(columns.iter().map(|c| c.name.clone()));
    csv_writer.write_record(&header)?;
    for (i, t) in t_grid.iter().enumerate() {
        let mut record = vec![t.to_string()];
        record.extend(columns.iter().map(|c| c.values[i].to_string()));
        csv_writer.write_record(&record)?;
    }
    csv_writer.flush().map_err(|source| Error::WriteFile {
        path: PathBuf::from("<writer>"),
        source,
    })?;
    Ok(())
}

pub fn write_curve_table_file(path: &Path, t_grid: &[f64], columns: &[CurveColumn]) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::WriteFile {
        path: path.to_path_buf(),
        source,
    })?;
    write_curve_table(BufWriter::new(file), t_grid, columns)
}

// ---------------------------------------------------------------------------
// report document

/// A number tagged with its unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

impl Quantity {
    pub fn percent(value: f64) -> Self {
        Self {
            value,
            unit: "percent".into(),
        }
    }

    pub fn hours(value: f64) -> Self {
        Self {
            value,
            unit: "hours".into(),
        }
    }

    pub fn dimensionless(value: f64) -> Self {
        Self {
            value,
            unit: "dimensionless".into(),
        }
    }

    pub fn megawatts(value: f64) -> Self {
        Self {
            value,
            unit: "MW".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_coefficient: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs {
    pub beta_w: Quantity,
    pub beta_ips: Quantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wind: Option<SourceEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solar: Option<SourceEcho>,
    pub fit_mode: String,
    pub amplitude_mode: String,
    pub actual_power_floor: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub time_advance: Quantity,
    pub observed_rmse: Quantity,
    pub fitted: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub source: String,
    pub amplitude: Quantity,
    pub time_coefficient: Quantity,
    /// "given", "paper" or "least_squares".
    pub fit_mode: String,
    pub excluded_samples: usize,
    pub coverage_violations: Vec<ViolationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationSection {
    pub t_star: Quantity,
    pub delta_lambda_star: Quantity,
    pub delta_alpha_star: Quantity,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpsReport {
    pub amplitude: Quantity,
    pub gamma: Quantity,
    pub contour_time_coefficient: Quantity,
    pub max_deviation: DeviationSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllSourcesReport {
    pub beta_ips: Quantity,
    pub amplitude: Quantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contour_time_coefficient: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRefs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_table: Option<String>,
}

/// The full composition report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub inputs: ReportInputs,
    pub fitted_profiles: Vec<ProfileReport>,
    pub ips: IpsReport,
    pub all_sources: AllSourcesReport,
    pub curves: CurveRefs,
}

pub fn report_to_string(report: &ReportDocument) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn write_report(path: &Path, report: &ReportDocument) -> Result<()> {
    let mut text = report_to_string(report)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| Error::WriteFile {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_report(text: &str) -> Result<ReportDocument> {
    Ok(serde_json::from_str(text)?)
}
