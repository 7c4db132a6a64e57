use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use matraj_core::{CoeffModel, Scheme, SweepVariable};

/// Trajectory design and rate simulation for a single movable antenna.
#[derive(Debug, Parser)]
#[command(name = "matraj", version, about)]
pub struct Cli {
    /// Directory for CSV and JSON outputs.
    #[arg(long, global = true, env = "MATRAJ_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one channel realization with every selected scheme.
    Solve(SolveArgs),
    /// Monte-Carlo sweep of average rates over one parameter.
    Sweep(SweepArgs),
    /// Per-slot traces plus the gain landscape for plotting.
    Trace(SolveArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Seed for the channel (and the start position unless --start-pos is given).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_delimiter = ',', default_values = ["proposed", "myopic", "farsighted", "fpa"])]
    pub schemes: Vec<SchemeArg>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Seed for all realizations; required so runs are reproducible.
    #[arg(long)]
    pub seed: u64,

    #[arg(long)]
    pub variable: VariableArg,

    /// Comma-separated values of the swept variable.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,

    #[arg(long, default_value_t = 1000)]
    pub realizations: usize,
}

/// Physical and channel-model parameters shared by all subcommands.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Carrier wavelength in meters.
    #[arg(long, default_value_t = 0.06)]
    pub wavelength: f64,
    /// Length of the movement region in meters.
    #[arg(long, default_value_t = 0.36)]
    pub region: f64,
    /// Maximum antenna velocity in m/s.
    #[arg(long, default_value_t = 0.12)]
    pub v_max: f64,
    /// Slot length in seconds.
    #[arg(long, default_value_t = 0.01)]
    pub slot: f64,
    /// Block duration T in seconds; the slot count is round(T / slot).
    #[arg(long, default_value_t = 2.0)]
    pub duration: f64,
    /// Number of grid cells for the graph solver.
    #[arg(long, default_value_t = 600)]
    pub grids: usize,
    /// Transmit power in watts.
    #[arg(long, default_value_t = 40.0)]
    pub power: f64,
    /// Noise power in watts.
    #[arg(long, default_value_t = 1e-11)]
    pub noise: f64,
    /// Start position in meters; drawn from the seed as a random grid center if omitted.
    #[arg(long)]
    pub start_pos: Option<f64>,
    /// Number of channel paths.
    #[arg(long, default_value_t = 4)]
    pub paths: usize,
    /// Link distance in meters.
    #[arg(long, default_value_t = 100.0)]
    pub distance: f64,
    #[arg(long, default_value_t = 2.8)]
    pub pathloss: f64,
    /// Power gain at 1 m; defaults to (wavelength / 4π)².
    #[arg(long)]
    pub reference_gain: Option<f64>,
    #[arg(long, value_enum, default_value_t = CoeffArg::ComplexGaussian)]
    pub coeff_model: CoeffArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Proposed,
    Myopic,
    Farsighted,
    Fpa,
    #[value(name = "closed_form")]
    ClosedForm,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Proposed => Scheme::Proposed,
            SchemeArg::Myopic => Scheme::Myopic,
            SchemeArg::Farsighted => Scheme::Farsighted,
            SchemeArg::Fpa => Scheme::Fpa,
            SchemeArg::ClosedForm => Scheme::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariableArg {
    #[value(name = "duration_T")]
    DurationT,
    #[value(name = "num_paths")]
    NumPaths,
    #[value(name = "v_max")]
    VMax,
}

impl From<VariableArg> for SweepVariable {
    fn from(v: VariableArg) -> Self {
        match v {
            VariableArg::DurationT => SweepVariable::DurationT,
            VariableArg::NumPaths => SweepVariable::NumPaths,
            VariableArg::VMax => SweepVariable::VMax,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoeffArg {
    ComplexGaussian,
    UniformPhase,
}

impl From<CoeffArg> for CoeffModel {
    fn from(c: CoeffArg) -> Self {
        match c {
            CoeffArg::ComplexGaussian => CoeffModel::ComplexGaussian,
            CoeffArg::UniformPhase => CoeffModel::UniformPhase,
        }
    }
}
