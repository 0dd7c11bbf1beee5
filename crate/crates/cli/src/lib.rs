//! Command-line front-end for the `orthoplate` library.
//!
//! Exit codes: 0 success, 1 failed self-check, 2 user or configuration
//! error, 3 numerical or resource error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{cmd_identify, cmd_modes, cmd_simulate, cmd_tf, cmd_validate, IdentifyArgs};
pub use config::{ModeSetSpec, RunConfig};

/// Failure carrying the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    pub fn user(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<orthoplate::Error> for CliError {
    fn from(e: orthoplate::Error) -> Self {
        use orthoplate::Error as E;
        match e {
            E::Domain(_) | E::Parse { .. } | E::Signal(_) => CliError::user(e.to_string()),
            E::Numerical(_) | E::Pole { .. } | E::Resource(_) | E::Bandwidth(_) => CliError::numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "orthoplate", version, about = "Modal analysis and identification of orthotropic plates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Mode indices (`elastic`, `all`, or e.g. `3..12,15`); overrides `mode_set`.
    #[arg(long = "mode-set")]
    pub mode_set: Option<String>,
    /// Viscous damping in 1/s; overrides `plate.alpha`.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowArg {
    None,
    Hann,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the eigenproblem; write the frequency table and mode coefficients.
    Modes(ConfigArgs),
    /// Evaluate the modal transfer function on the configured grid.
    Tf {
        #[command(flatten)]
        args: ConfigArgs,
        /// Unwrap the phase column.
        #[arg(long)]
        unwrap: bool,
    },
    /// Simulate the sensor response to the configured excitation.
    Simulate(ConfigArgs),
    /// Estimate the transfer function from recorded input/output signals.
    Identify {
        /// Input (force) signal CSV.
        #[arg(long)]
        input: PathBuf,
        /// Output (sensor) signal CSV.
        #[arg(long)]
        output: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// FFT length, a power of two.
        #[arg(long, default_value_t = orthoplate::sysid::DEFAULT_NFFT)]
        nfft: usize,
        #[arg(long, value_enum, default_value_t = WindowArg::None)]
        window: WindowArg,
        /// Pad records shorter than the FFT length with zeros.
        #[arg(long)]
        zero_pad: bool,
        /// Sample rate in Hz for single-column signal files.
        #[arg(long)]
        sample_rate: Option<f64>,
        /// Lower edge of the peak search band, Hz.
        #[arg(long = "f-min", default_value_t = 0.0)]
        f_min: f64,
        /// Upper edge of the peak search band, Hz (default: Nyquist).
        #[arg(long = "f-max")]
        f_max: Option<f64>,
        /// Number of peaks to report.
        #[arg(long, default_value_t = 5)]
        peaks: usize,
        /// Estimate the damping of every peak from its half-power bandwidth.
        #[arg(long)]
        damping: bool,
    },
    /// Run the built-in self-checks.
    Validate {
        #[arg(long, default_value_t = orthoplate::validation::ValidationOptions::default().seed)]
        seed: u64,
        /// Offset added to the coupling matrix during assembly (negative control).
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb_kappa: f64,
    },
}

/// Executes a parsed command line; returns the text to print on success.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Modes(args) => cmd_modes(&args),
        Command::Tf { args, unwrap } => cmd_tf(&args, unwrap),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Identify { input, output, out, nfft, window, zero_pad, sample_rate, f_min, f_max, peaks, damping } => {
            cmd_identify(&IdentifyArgs {
                input,
                output,
                out,
                nfft,
                window: match window {
                    WindowArg::None => orthoplate::Window::None,
                    WindowArg::Hann => orthoplate::Window::Hann,
                },
                zero_pad,
                sample_rate,
                f_min,
                f_max,
                peaks,
                damping,
            })
        }
        Command::Validate { seed, perturb_kappa } => {
            cmd_validate(&orthoplate::validation::ValidationOptions { seed, kappa_perturbation: perturb_kappa })
        }
    }
}
