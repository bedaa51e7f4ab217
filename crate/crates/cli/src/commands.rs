//! One function per subcommand.

use std::io::Write;
use std::path::{Path, PathBuf};

use ipsuq_core::error::{Error, Result};
use ipsuq_core::fitting::FitOptions;
use ipsuq_core::io::{self, CurveColumn};
use ipsuq_core::profile::ExpDecayProfile;
use ipsuq_core::synth::{self, SynthSpec};

use crate::fmt_sig;
use crate::pipeline::{self, amplitude_mode_label, fit_mode_label, ComposedFleet};

fn stream_error(source: std::io::Error) -> Error {
    Error::WriteFile {
        path: PathBuf::from("<output>"),
        source,
    }
}

/// `fit`: estimate a profile from a sample CSV and print the outcome.
pub fn cmd_fit(
    samples: &Path,
    options: &FitOptions,
    out: &mut dyn Write,
) -> Result<ExpDecayProfile> {
    let (profile, excluded, violations) = pipeline::fit_from_samples(samples, options)?;
    let mut print = |line: String| writeln!(out, "{line}").map_err(stream_error);
    print("fitted profile".into())?;
    print(format!(
        "  amplitude_pct: {}",
        fmt_sig(profile.amplitude_pct(), 6)
    ))?;
    print(format!("  tau_h: {}", fmt_sig(profile.tau_hours(), 6)))?;
    print(format!("  fit_mode: {}", fit_mode_label(options.fit_mode)))?;
    print(format!(
        "  amplitude_mode: {}",
        amplitude_mode_label(options.amplitude_mode)
    ))?;
    print(format!("  samples_excluded: {excluded}"))?;
    print(format!("  coverage_violations: {}", violations.len()))?;
    for v in &violations {
        print(format!(
            "    t={} observed={} fitted={}",
            fmt_sig(v.time_advance_h, 6),
            fmt_sig(v.rmse_pct, 6),
            fmt_sig(v.fitted_pct, 6)
        ))?;
    }
    Ok(profile)
}

fn print_summary(fleet: &ComposedFleet, out: &mut dyn Write) -> Result<()> {
    let mut print = |line: String| writeln!(out, "{line}").map_err(stream_error);
    for source in &fleet.sources {
        print(format!(
            "{}: amplitude_pct: {}  tau_h: {}  ({})",
            source.name,
            fmt_sig(source.profile.amplitude_pct(), 6),
            fmt_sig(source.profile.tau_hours(), 6),
            source.fit_mode,
        ))?;
    }
    print("ips".into())?;
    print(format!(
        "  amplitude_pct: {}",
        fmt_sig(fleet.composition.mixture.total_amplitude_pct(), 6)
    ))?;
    print(format!("  gamma: {}", fmt_sig(fleet.composition.gamma, 6)))?;
    print(format!(
        "  contour_tau_h: {}",
        fmt_sig(fleet.contour.tau_hours(), 6)
    ))?;
    print(format!(
        "  max_deviation: t_star_h: {}  delta_alpha_pct: {}{}",
        fmt_sig(fleet.deviation.t_star_h, 6),
        fmt_sig(fleet.deviation.delta_alpha_star_pct, 6),
        if fleet.deviation.degenerate {
            "  (degenerate)"
        } else {
            ""
        },
    ))?;
    print("all_sources".into())?;
    print(format!(
        "  beta_ips: {}",
        fmt_sig(fleet.scenario.beta_ips, 6)
    ))?;
    print(format!(
        "  amplitude_pct: {}",
        fmt_sig(fleet.all_sources.amplitude_pct(), 6)
    ))?;
    match fleet.all_sources.contour() {
        Some(contour) => {
            print(format!(
                "  contour_tau_h: {}",
                fmt_sig(contour.tau_hours(), 6)
            ))?;
        }
        None => print("  note: beta_ips = 0, all-sources uncertainty is identically zero".into())?,
    }
    Ok(())
}

/// `compose`: full pipeline; writes `report.json` and `curves.csv` under
/// `out_dir` and prints a summary.
pub fn cmd_compose(config: &Path, out_dir: &Path, out: &mut dyn Write) -> Result<ComposedFleet> {
    let fleet = pipeline::compose_from_config(config)?;
    std::fs::create_dir_all(out_dir).map_err(|source| Error::WriteFile {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let grid = io::time_grid(io::DEFAULT_T_MAX_H, io::DEFAULT_T_STEP_H)?;
    let curve_path = out_dir.join("curves.csv");
    io::write_curve_table_file(&curve_path, &grid, &pipeline::curve_columns(&fleet, &grid))?;

    let report = pipeline::build_report(&fleet, Some("curves.csv".into()));
    let report_path = out_dir.join("report.json");
    io::write_report(&report_path, &report)?;

    print_summary(&fleet, out)?;
    writeln!(out, "report: {}", report_path.display()).map_err(stream_error)?;
    writeln!(out, "curves: {}", curve_path.display()).map_err(stream_error)?;
    Ok(fleet)
}

/// `report`: the report document as JSON, to a file or the stream.
pub fn cmd_report(config: &Path, out_path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let fleet = pipeline::compose_from_config(config)?;
    let report = pipeline::build_report(&fleet, None);
    match out_path {
        Some(path) => io::write_report(path, &report)?,
        None => writeln!(out, "{}", io::report_to_string(&report)?).map_err(stream_error)?,
    }
    Ok(())
}

/// `contour`: constant-coefficient bound parameters for the intermittent
/// share and for all sources.
pub fn cmd_contour(config: &Path, out: &mut dyn Write) -> Result<()> {
    let fleet = pipeline::compose_from_config(config)?;
    let mut print = |line: String| writeln!(out, "{line}").map_err(stream_error);
    print(format!(
        "ips contour: alpha(t) = {} * (1 - exp(-t / {}))  [percent, hours]",
        fmt_sig(fleet.contour.amplitude_pct(), 6),
        fmt_sig(fleet.contour.tau_hours(), 6)
    ))?;
    match fleet.all_sources.contour() {
        Some(contour) => print(format!(
            "all-sources contour: alpha(t) = {} * (1 - exp(-t / {}))  [percent, hours]",
            fmt_sig(contour.amplitude_pct(), 6),
            fmt_sig(contour.tau_hours(), 6)
        ))?,
        None => print("all-sources contour: 0 (beta_ips = 0)".into())?,
    }
    Ok(())
}

/// `maxdev`: widest gap between the contour and the sum.
pub fn cmd_maxdev(config: &Path, out: &mut dyn Write) -> Result<()> {
    let fleet = pipeline::compose_from_config(config)?;
    let report = fleet.deviation;
    let mut print = |line: String| writeln!(out, "{line}").map_err(stream_error);
    print(format!("t_star_h: {}", fmt_sig(report.t_star_h, 6)))?;
    print(format!(
        "delta_lambda_star: {}",
        fmt_sig(report.delta_lambda_star, 6)
    ))?;
    print(format!(
        "delta_alpha_star_pct: {}",
        fmt_sig(report.delta_alpha_star_pct, 6)
    ))?;
    print(format!("degenerate: {}", report.degenerate))?;
    Ok(())
}

fn write_table(
    t_grid: &[f64],
    columns: &[CurveColumn],
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    match out_path {
        Some(path) => io::write_curve_table_file(path, t_grid, columns),
        None => io::write_curve_table(out, t_grid, columns),
    }
}

/// `equiv-tau`: table of the equivalent time coefficient on a grid.
pub fn cmd_equiv_tau(
    config: &Path,
    t_max_h: f64,
    t_step_h: f64,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let fleet = pipeline::compose_from_config(config)?;
    let grid = io::time_grid(t_max_h, t_step_h)?;
    let mixture = &fleet.composition.mixture;
    let column = CurveColumn {
        name: "tau_equiv_h".into(),
        values: grid
            .iter()
            .map(|&h| {
                mixture
                    .equivalent_tau(ipsuq_core::TimeAdvance::new(h).expect("validated grid"))
                    .hours()
            })
            .collect(),
    };
    write_table(&grid, &[column], out_path, out)
}

/// `curves`: the full curve table on a grid.
pub fn cmd_curves(
    config: &Path,
    t_max_h: f64,
    t_step_h: f64,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let fleet = pipeline::compose_from_config(config)?;
    let grid = io::time_grid(t_max_h, t_step_h)?;
    let columns = pipeline::curve_columns(&fleet, &grid);
    write_table(&grid, &columns, out_path, out)
}

/// Arguments of the `synth` subcommand.
#[derive(Debug, Clone)]
pub struct SynthCommand {
    pub amplitude_pct: f64,
    pub tau_h: f64,
    pub samples_per_advance: usize,
    pub base_actual_mw: f64,
    pub rng_seed: u64,
    pub t_max_h: f64,
    pub t_step_h: f64,
    pub out: PathBuf,
}

/// `synth`: seeded synthetic sample CSV with advances `step, 2 step, ...`
/// up to `t_max`.
pub fn cmd_synth(command: &SynthCommand, out: &mut dyn Write) -> Result<()> {
    let profile = ExpDecayProfile::new(command.amplitude_pct, command.tau_h)?;
    let advances: Vec<f64> = io::time_grid(command.t_max_h, command.t_step_h)?
        .into_iter()
        .filter(|&t| t > 0.0)
        .collect();
    let spec = SynthSpec::new(
        profile,
        command.samples_per_advance,
        advances,
        command.base_actual_mw,
        command.rng_seed,
    )?;
    let samples = synth::generate(&spec);
    io::write_samples(&command.out, &samples)?;
    writeln!(
        out,
        "wrote {} samples to {}",
        samples.len(),
        command.out.display()
    )
    .map_err(stream_error)?;
    Ok(())
}
