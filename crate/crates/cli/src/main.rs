//! `flyqubit` command-line driver.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
//! failure, 4 validation failure.

mod commands;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flyqubit::params::{ConfigFile, DeviceConfig};

use output::UnitSystem;

#[derive(Parser, Debug)]
#[command(name = "flyqubit", version, about = "SAW moving-quantum-dot flying qubit simulator")]
struct Cli {
    /// TOML device configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Unit system of numeric CSV columns.
    #[arg(long, global = true, value_enum, default_value = "si")]
    units: UnitSystem,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct GridArgs {
    /// Finite-difference grid points.
    #[arg(long, default_value_t = flyqubit::analysis::GRID_POINTS)]
    grid_points: usize,
    /// Samples over one SAW period for tracking and β.
    #[arg(long, default_value_t = flyqubit::analysis::PERIOD_SAMPLES)]
    samples: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derived scales, natural units and the thermal check.
    Derive,
    /// Potential, levels and wavefunctions at selected times.
    Levels {
        /// Times in ns.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1, 0.15, 0.2, 0.3, 0.3354])]
        times: Vec<f64>,
        /// Number of levels.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = flyqubit::analysis::GRID_POINTS)]
        grid_points: usize,
    },
    /// Driven two-level dynamics at the representative time.
    Rabi {
        /// Integration span in ns; default is the longer of 1 ns and four Rabi cycles.
        #[arg(long)]
        duration: Option<f64>,
        /// Drive detuning in units of |D01|.
        #[arg(long, default_value_t = 0.0)]
        detuning: f64,
        /// Also report the coupling with the cosh² element in the denominator.
        #[arg(long)]
        paper_literal_dij: bool,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// β(t) between the qubit levels over one SAW period.
    Adiabaticity {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Coulomb coefficients, iSWAP gate and RWA fidelity for two channels.
    Twoqubit {
        /// Channel separation in m (overrides the config).
        #[arg(long)]
        d: Option<f64>,
        /// Fidelity sweep end in ns; default is the iSWAP time.
        #[arg(long)]
        t_max: Option<f64>,
        /// Use the published matrix elements instead of the eigensolver.
        #[arg(long)]
        fixture_paper_z: bool,
        /// Lower-channel SAW delay in ns relative to the upper channel.
        #[arg(long, default_value_t = 0.0)]
        lower_delay: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Built-in oracle suite.
    Validate {
        #[arg(long, default_value_t = flyqubit::analysis::GRID_POINTS)]
        grid_points: usize,
        /// Skip the published-number comparison section.
        #[arg(long)]
        skip_published: bool,
        /// Run at 64 grid points and succeed only if the convergence oracles fail.
        #[arg(long)]
        self_test: bool,
    },
}

#[derive(Debug)]
pub enum Failure {
    Io(String),
    Config(String),
    Numerical(String),
    Validation(String),
}

impl Failure {
    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Failure::Io(format!("{}: {err}", path.display()))
    }

    pub fn with_context(self, ctx: &str) -> Self {
        match self {
            Failure::Io(m) => Failure::Io(format!("{ctx}: {m}")),
            Failure::Config(m) => Failure::Config(format!("{ctx}: {m}")),
            Failure::Numerical(m) => Failure::Numerical(format!("{ctx}: {m}")),
            Failure::Validation(m) => Failure::Validation(format!("{ctx}: {m}")),
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Validation(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Validation(m) => write!(f, "validation failed: {m}"),
        }
    }
}

impl From<flyqubit::Error> for Failure {
    fn from(e: flyqubit::Error) -> Self {
        match e {
            flyqubit::Error::InvalidConfig { .. } => Failure::Config(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<DeviceConfig, Failure> {
    let file = match path {
        None => ConfigFile::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?
        }
    };
    Ok(file.resolve()?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = load_config(cli.config.as_deref())?;
    let ctx = commands::Context::new(config, &cli.out, cli.units)?;
    match cli.command {
        Command::Derive => commands::derive(ctx),
        Command::Levels { times, levels, grid_points } => commands::levels(ctx, &times, levels, grid_points),
        Command::Rabi { duration, detuning, paper_literal_dij, grid } => {
            commands::rabi(ctx, duration, detuning, paper_literal_dij, grid.grid_points, grid.samples)
        }
        Command::Adiabaticity { grid } => commands::adiabaticity(ctx, grid.grid_points, grid.samples),
        Command::Twoqubit { d, t_max, fixture_paper_z, lower_delay, grid } => commands::twoqubit(
            ctx,
            commands::TwoQubitOptions { d, t_max, fixture: fixture_paper_z, lower_delay, grid_points: grid.grid_points, samples: grid.samples },
        ),
        Command::Validate { grid_points, skip_published, self_test } => commands::validate(ctx, grid_points, skip_published, self_test),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("flyqubit: {e}");
            ExitCode::from(e.code())
        }
    }
}
