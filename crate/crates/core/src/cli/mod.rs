//! `lcsense` command-line front end.
//!
//! Exit codes: 0 success, 2 partial data errors, 64 usage, 65 input format.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{ConfigError, SystemConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_FORMAT: i32 = 65;

/// Failure of a whole command, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Format(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Format(_) => EXIT_FORMAT,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Format(m) => write!(f, "input format error: {m}"),
            CliError::Data(m) => write!(f, "error: {m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lcsense",
    version,
    about = "Chipless LC temperature sensor toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFormat {
    S2p,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitKindArg {
    Linear,
    ExpDecay,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Nearest,
    Highest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Clamp,
    Strict,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacitance, Q and self-resonance from one-port Touchstone files.
    Extract {
        files: Vec<PathBuf>,
        /// Averaging band in Hz, `lo:hi`.
        #[arg(long, default_value = "1e6:200e6")]
        band: String,
        /// Capacitor plate area in cm²; adds per-area columns.
        #[arg(long)]
        area: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the coupled reader/sensor system over temperature.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value = "s2p")]
        format: SweepFormat,
    },
    /// Fit a capacitance-temperature law to `temperature_c,capacitance_f` CSV.
    Fit {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        kind: FitKindArg,
        /// Frequency (Hz) at which the data were measured.
        #[arg(long)]
        frequency_tag: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a calibration curve from `temperature_c,f_hz` dip listings.
    Calibrate {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "highest")]
        policy: PolicyArg,
        /// Seed frequency for the `nearest` policy, Hz.
        #[arg(long)]
        reference_hz: Option<f64>,
        /// Frequency column to read, e.g. `reader_dip_hz` for a simulate
        /// summary.
        #[arg(long, default_value = "f_hz")]
        column: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert measured resonant frequencies (Hz) to temperatures.
    Invert {
        curve: PathBuf,
        #[arg(required = true, allow_negative_numbers = true)]
        frequencies: Vec<f64>,
        #[arg(long, value_enum, default_value = "clamp")]
        mode: ModeArg,
    },
    /// Sensitivity report for a calibration curve, a capacitance series, or
    /// a comparison table.
    Report {
        #[arg(long)]
        curve: Option<PathBuf>,
        /// `temperature_c,capacitance_f` CSV.
        #[arg(long)]
        capacitance: Option<PathBuf>,
        /// Temperature span for the capacitance sensitivity, `lo:hi` °C.
        #[arg(long, default_value = "20:50")]
        span: String,
        /// Table with columns reference,f0_mhz,slope_mhz_per_degc,printed_pct_per_degc.
        #[arg(long)]
        compare: Option<PathBuf>,
        /// Relative deviation above which a comparison row is flagged.
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
    },
}

/// Runs the CLI with explicit streams and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match commands::dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}
