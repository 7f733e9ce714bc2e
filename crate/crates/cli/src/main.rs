//! `tflattice`: analysis, synthesis and plotting on the √π time-frequency
//! lattice.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Debug, Parser)]
#[command(name = "tflattice", version, about = "Time-frequency lattice expansions with a self-Fourier waveform")]
pub struct Cli {
    /// Bumps in the waveform series.
    #[arg(long, global = true, default_value_t = 8)]
    pub n_terms: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the structure constants α_n.
    Alpha {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 4096)]
        quad_points: usize,
        /// Print a JSON array instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Tabulate the waveform a(t) or its attenuation in dB as CSV.
    Waveform {
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        t_max: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// Write 20·log10|a(t)/a(0)| instead of a(t).
        #[arg(long)]
        attenuation: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample a signal spec to CSV.
    Generate {
        /// atom, gaussian, monocycle, hermite:L, displaced:XI,ETA, diff:A,B, file:PATH
        #[arg(long, allow_hyphen_values = true)]
        signal: String,
        /// Truncation the default grid is sized for.
        #[arg(short = 'M', long = "m-max", default_value_t = 8)]
        m_max: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute lattice coefficients and write them as JSON.
    Analyze {
        #[arg(long, allow_hyphen_values = true)]
        signal: String,
        #[arg(short = 'M', long = "m-max", default_value_t = 8)]
        m_max: usize,
        #[arg(short = 'N', long = "n-max", default_value_t = 8)]
        n_max: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Rebuild a signal from a coefficient file and write it as CSV.
    Synthesize {
        #[arg(long)]
        coeffs: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a coefficient file, or the attenuation curve, as SVG.
    Plot {
        #[arg(long, required_unless_present = "attenuation", conflicts_with = "attenuation")]
        coeffs: Option<PathBuf>,
        /// Plot attenuation of a(t) in dB instead of a coefficient grid.
        #[arg(long)]
        attenuation: bool,
        /// Reference curves: gaussian, approx3, approx5 (any approxK).
        #[arg(long, value_delimiter = ',', requires = "attenuation")]
        overlay: Vec<String>,
        /// Curve range in units of √π.
        #[arg(long, default_value_t = 12.0)]
        t_max_steps: f64,
        /// Drop curve points below this many dB.
        #[arg(long, default_value_t = -300.0, allow_hyphen_values = true)]
        y_floor: f64,
        #[arg(long, default_value_t = 1.0)]
        magnify: f64,
        #[arg(long, default_value_t = 40.0)]
        cell_px: f64,
        #[arg(long, default_value_t = 0.45)]
        radius_scale: f64,
        #[arg(long)]
        no_axes: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Displacement function of the atom, or displacement estimation.
    Ambiguity {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "estimate")]
        xi: Option<f64>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "estimate")]
        eta: Option<f64>,
        #[arg(short = 'M', long = "m-max", default_value_t = 8)]
        m_max: usize,
        #[arg(short = 'N', long = "n-max", default_value_t = 8)]
        n_max: usize,
        /// Estimate (ξ, η) from `--coeffs` instead.
        #[arg(long, requires = "coeffs", conflicts_with_all = ["xi", "eta"])]
        estimate: bool,
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the numerical acceptance checks.
    Verify {
        /// List the checks without running them.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        tol: TolArgs,
    },
}

/// Explicit sampling grid. Omit all three for the default grid.
#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, allow_hyphen_values = true, requires = "t_max")]
    pub t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "t_min")]
    pub t_max: Option<f64>,
    /// Must be √π/K for an integer K ≥ 32.
    #[arg(long, requires = "t_min")]
    pub dt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    #[arg(long)]
    pub tol_alpha: Option<f64>,
    #[arg(long)]
    pub tol_energy: Option<f64>,
    #[arg(long)]
    pub tol_reconstruction: Option<f64>,
    #[arg(long)]
    pub tol_orthonormality: Option<f64>,
    #[arg(long)]
    pub tol_covariance: Option<f64>,
    #[arg(long)]
    pub tol_anticommutation: Option<f64>,
    #[arg(long)]
    pub tol_displacement: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
