use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ipsuq_cli::commands::{self, SynthCommand};
use ipsuq_cli::exit_code;
use ipsuq_core::fitting::{AmplitudeMode, FitMode, FitOptions};

/// Forecast-uncertainty statistics for intermittent power fleets.
#[derive(Parser)]
#[command(name = "ipsuq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum FitModeArg {
    /// Amplitude from the sequence, tau = amplitude / max forward slope.
    #[default]
    Paper,
    /// Bounded two-parameter least squares.
    Lsq,
}

impl From<FitModeArg> for FitMode {
    fn from(value: FitModeArg) -> Self {
        match value {
            FitModeArg::Paper => FitMode::MaxSlope,
            FitModeArg::Lsq => FitMode::LeastSquares,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum AmplitudeArg {
    /// Largest RMSE value in the sequence.
    #[default]
    Max,
    /// RMSE of the 24-hours-ahead bin.
    At24,
}

impl From<AmplitudeArg> for AmplitudeMode {
    fn from(value: AmplitudeArg) -> Self {
        match value {
            AmplitudeArg::Max => AmplitudeMode::Max,
            AmplitudeArg::At24 => AmplitudeMode::At24h,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit a forecast-error profile from a sample CSV.
    Fit {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        fit_mode: FitModeArg,
        /// Amplitude condition.
        #[arg(long, value_enum, default_value_t)]
        amplitude: AmplitudeArg,
        /// Samples with actual power at or below this are excluded (MW).
        #[arg(long, default_value_t = 0.0)]
        floor: f64,
    },
    /// Compose a fleet scenario; write report.json and curves.csv.
    Compose {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print the composition report as JSON.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the contour parameters of the composed fleet.
    Contour {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve for the maximum contour-sum deviation.
    Maxdev {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tabulate the equivalent time coefficient tau(t).
    EquivTau {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 24.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.05)]
        t_step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the full curve table CSV.
    Curves {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 24.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.05)]
        t_step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded synthetic sample CSV.
    Synth {
        /// Ground-truth amplitude, percent.
        #[arg(long)]
        amp: f64,
        /// Ground-truth time coefficient, hours.
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 10_000)]
        samples_per_advance: usize,
        /// Constant actual power, MW.
        #[arg(long, default_value_t = 100.0)]
        base_mw: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Advances run step, 2 step, ... up to this bound (hours).
        #[arg(long, default_value_t = 24.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1.0)]
        t_step: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> ipsuq_core::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Fit {
            samples,
            fit_mode,
            amplitude,
            floor,
        } => {
            let options = FitOptions {
                amplitude_mode: amplitude.into(),
                actual_power_floor_mw: floor,
                fit_mode: fit_mode.into(),
            };
            commands::cmd_fit(&samples, &options, &mut out)?;
        }
        Command::Compose {
            config,
            out: out_dir,
        } => {
            commands::cmd_compose(&config, &out_dir, &mut out)?;
        }
        Command::Report {
            config,
            out: out_path,
        } => {
            commands::cmd_report(&config, out_path.as_deref(), &mut out)?;
        }
        Command::Contour { config } => {
            commands::cmd_contour(&config, &mut out)?;
        }
        Command::Maxdev { config } => {
            commands::cmd_maxdev(&config, &mut out)?;
        }
        Command::EquivTau {
            config,
            t_max,
            t_step,
            out: out_path,
        } => {
            commands::cmd_equiv_tau(&config, t_max, t_step, out_path.as_deref(), &mut out)?;
        }
        Command::Curves {
            config,
            t_max,
            t_step,
            out: out_path,
        } => {
            commands::cmd_curves(&config, t_max, t_step, out_path.as_deref(), &mut out)?;
        }
        Command::Synth {
            amp,
            tau,
            samples_per_advance,
            base_mw,
            seed,
            t_max,
            t_step,
            out: out_path,
        } => {
            let command = SynthCommand {
                amplitude_pct: amp,
                tau_h: tau,
                samples_per_advance,
                base_actual_mw: base_mw,
                rng_seed: seed,
                t_max_h: t_max,
                t_step_h: t_step,
                out: out_path,
            };
            commands::cmd_synth(&command, &mut out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep help/version at exit 0; argument problems are
            // validation errors (exit 1)
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed stdout (e.g. piping into `head`) is not an error
        Err(ipsuq_core::Error::WriteFile { source, .. })
            if source.kind() == std::io::ErrorKind::BrokenPipe =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
