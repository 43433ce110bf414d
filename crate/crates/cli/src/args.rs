//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use erlab_core::sim::SimConfig;
use erlab_core::units::Dimension;

use crate::error::CliError;
use crate::report::DEFAULT_PRECISION;
use crate::request::{Command, OutputFormat, QuantityArg, RunRequest};

#[derive(Debug, Parser)]
#[command(
    name = "erlab",
    version,
    about = "Energy resolution limits of magnetometers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,

    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Significant digits of printed values.
    #[arg(long, default_value_t = DEFAULT_PRECISION, global = true,
          value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..=17))]
    pub precision: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// List the species catalog.
    SpeciesList,
    /// Spin-destruction limited floor of an alkali vapor cell.
    Atomic {
        /// Full name (133Cs) or element (Cs).
        #[arg(long)]
        species: String,
        /// Number density, e.g. 1e14/cm3.
        #[arg(long)]
        density: String,
        /// Cell volume, e.g. 10cm3.
        #[arg(long)]
        volume: String,
        /// Cell temperature; defaults to the species' reference temperature.
        #[arg(long)]
        temp: Option<String>,
    },
    /// Predicted ERL of a flux-locked SQUID.
    Squid {
        /// Flux noise as a fraction of the flux quantum, in (0, 1).
        #[arg(long)]
        p: f64,
        #[arg(long)]
        temp: String,
        #[arg(long)]
        tau: String,
        /// Measured ERL in units of hbar.
        #[arg(long)]
        measured_hbar: Option<f64>,
    },
    /// NV-diamond ERL, optionally against a device's noise density.
    Diamond {
        #[arg(long)]
        temp: String,
        #[arg(long)]
        tau: String,
        /// Field noise density, e.g. 300pT/rtHz.
        #[arg(long, requires = "volume")]
        psd: Option<String>,
        /// Sensing volume.
        #[arg(long, requires = "psd")]
        volume: Option<String>,
    },
    /// Atomic magnetometer reference table at n = 1e14/cm3, V = 10cm3.
    Table1,
    /// SQUID comparison table; bundled records unless --records is given.
    Table2 {
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Compare a file of published SQUID records against the prediction.
    Compare {
        #[arg(long)]
        records: PathBuf,
    },
    /// Monte Carlo of the spin-noise transient.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub atoms: f64,
    #[arg(long)]
    pub trajectories: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub steps_per_tau: u32,
    /// End time in units of tau.
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    /// Relaxation time.
    #[arg(long, default_value = "1s")]
    pub tau: String,
    /// Worker threads; the result does not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write this trajectory's path as CSV (repeatable).
    #[arg(long)]
    pub dump_trajectory: Vec<u64>,
    #[arg(long, default_value = ".")]
    pub dump_dir: PathBuf,
}

impl Cli {
    pub fn into_request(self) -> Result<(RunRequest, Option<PathBuf>), CliError> {
        let q = QuantityArg::parse;
        let mut dump_dir = None;
        let command = match self.command {
            Sub::SpeciesList => Command::SpeciesList,
            Sub::Atomic {
                species,
                density,
                volume,
                temp,
            } => Command::Atomic {
                species,
                density: q(&density, Dimension::NUMBER_DENSITY)?,
                volume: q(&volume, Dimension::VOLUME)?,
                temperature: temp.map(|t| q(&t, Dimension::TEMPERATURE)).transpose()?,
            },
            Sub::Squid {
                p,
                temp,
                tau,
                measured_hbar,
            } => Command::Squid {
                p,
                temperature: q(&temp, Dimension::TEMPERATURE)?,
                tau: q(&tau, Dimension::TIME)?,
                measured_erl_hbar: measured_hbar,
            },
            Sub::Diamond {
                temp,
                tau,
                psd,
                volume,
            } => Command::Diamond {
                temperature: q(&temp, Dimension::TEMPERATURE)?,
                tau: q(&tau, Dimension::TIME)?,
                device: match (psd, volume) {
                    (Some(p), Some(v)) => {
                        Some((q(&p, Dimension::FIELD_DENSITY)?, q(&v, Dimension::VOLUME)?))
                    }
                    _ => None,
                },
            },
            Sub::Table1 => Command::Table1,
            Sub::Table2 { records } => Command::Table2 { records },
            Sub::Compare { records } => Command::Compare { records },
            Sub::Simulate(s) => {
                let mut config = SimConfig::new(s.atoms, s.trajectories, s.seed)
                    .with_steps_per_tau(s.steps_per_tau)
                    .with_horizon(s.horizon);
                config.relaxation_time = q(&s.tau, Dimension::TIME)?.si;
                if !s.dump_trajectory.is_empty() {
                    dump_dir = Some(s.dump_dir);
                }
                Command::Simulate {
                    config,
                    threads: s.threads,
                    dump: s.dump_trajectory,
                }
            }
        };
        let request = RunRequest {
            command,
            format: match self.format {
                Format::Text => OutputFormat::Text,
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
            },
            output: self.output,
            precision: self.precision,
        };
        Ok((request, dump_dir))
    }
}
