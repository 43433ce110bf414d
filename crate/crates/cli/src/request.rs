//! Requests and their dispatch onto the library operations.

use std::collections::BTreeMap;
use std::path::PathBuf;

use erlab_core::sensors::{
    atomic_floor, bundled_records, compare_published, diamond_erl, parse_published_records,
    squid_erl, ComparisonRow, DiamondSpec, PublishedRecord, SquidSpec, VaporCell,
    REFERENCE_DENSITY, REFERENCE_ROWS, REFERENCE_VOLUME,
};
use erlab_core::sim::{simulate_transient, trajectory, SimConfig, SimReport, TrajectoryPoint};
use erlab_core::species::Catalog;
use erlab_core::units::{self, Dimension};

use crate::error::CliError;
use crate::report::{round_sig, Header, Layout, Provenance, Report, DEFAULT_PRECISION};

/// Overrides the bundled species file.
pub const SPECIES_FILE_ENV: &str = "ERLAB_SPECIES_FILE";

/// A dimensioned command-line value: the text as given and its SI value.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantityArg {
    pub text: String,
    pub si: f64,
}

impl QuantityArg {
    /// Parse `text`, requiring a unit suffix of dimension `dim`.
    pub fn parse(text: &str, dim: Dimension) -> Result<Self, CliError> {
        let si = units::parse_expecting(text, dim).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Self {
            text: text.to_string(),
            si,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    SpeciesList,
    Atomic {
        species: String,
        density: QuantityArg,
        volume: QuantityArg,
        /// Defaults to the species' reference temperature.
        temperature: Option<QuantityArg>,
    },
    Squid {
        p: f64,
        temperature: QuantityArg,
        tau: QuantityArg,
        measured_erl_hbar: Option<f64>,
    },
    Diamond {
        temperature: QuantityArg,
        tau: QuantityArg,
        /// Noise density and sensing volume of an actual device.
        device: Option<(QuantityArg, QuantityArg)>,
    },
    Table1,
    /// Bundled records unless a file is given.
    Table2 {
        records: Option<PathBuf>,
    },
    Compare {
        records: PathBuf,
    },
    Simulate {
        config: SimConfig,
        threads: Option<usize>,
        dump: Vec<u64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SpeciesList => "species-list",
            Command::Atomic { .. } => "atomic",
            Command::Squid { .. } => "squid",
            Command::Diamond { .. } => "diamond",
            Command::Table1 => "table1",
            Command::Table2 { .. } => "table2",
            Command::Compare { .. } => "compare",
            Command::Simulate { .. } => "simulate",
        }
    }

    /// Parameter echo for the report header.
    pub fn inputs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match self {
            Command::SpeciesList | Command::Table1 => {}
            Command::Atomic {
                species,
                density,
                volume,
                temperature,
            } => {
                put("species", species.clone());
                put("density", density.text.clone());
                put("volume", volume.text.clone());
                if let Some(t) = temperature {
                    put("temp", t.text.clone());
                }
            }
            Command::Squid {
                p,
                temperature,
                tau,
                measured_erl_hbar,
            } => {
                put("p", p.to_string());
                put("temp", temperature.text.clone());
                put("tau", tau.text.clone());
                if let Some(m) = measured_erl_hbar {
                    put("measured_hbar", m.to_string());
                }
            }
            Command::Diamond {
                temperature,
                tau,
                device,
            } => {
                put("temp", temperature.text.clone());
                put("tau", tau.text.clone());
                if let Some((psd, v)) = device {
                    put("psd", psd.text.clone());
                    put("volume", v.text.clone());
                }
            }
            Command::Table2 { records } => {
                put(
                    "records",
                    records
                        .as_ref()
                        .map_or("bundled".into(), |p| p.display().to_string()),
                );
            }
            Command::Compare { records } => put("records", records.display().to_string()),
            Command::Simulate { config, .. } => {
                put("atoms", config.atom_count.to_string());
                put("trajectories", config.trajectory_count.to_string());
                put("seed", config.seed.to_string());
                put("steps_per_tau", config.steps_per_tau.to_string());
                put("horizon", config.horizon.to_string());
                put("tau_s", config.relaxation_time.to_string());
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub command: Command,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    /// Significant digits of printed values.
    pub precision: usize,
}

impl RunRequest {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            format: OutputFormat::Text,
            output: None,
            precision: DEFAULT_PRECISION,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub header: Header,
    pub report: SimReport,
    pub trajectories: Vec<(u64, Vec<TrajectoryPoint>)>,
}

impl Simulation {
    pub fn rounded(&self, precision: usize) -> SimReport {
        let r = &self.report;
        SimReport {
            variance: round_sig(r.variance, precision),
            std_error: round_sig(r.std_error, precision),
            mean: round_sig(r.mean, precision),
            mean_std_error: round_sig(r.mean_std_error, precision),
            analytic_variance: round_sig(r.analytic_variance, precision),
            config_echo: r.config_echo,
        }
    }

    pub fn to_report(&self) -> Report {
        let r = &self.report;
        let mut out = Report::new(self.header.clone(), Layout::List);
        let label = "transient";
        out.push(label, "variance", r.variance, "1", Provenance::Derived);
        out.push(label, "std_error", r.std_error, "1", Provenance::Derived);
        out.push(label, "mean", r.mean, "1", Provenance::Derived);
        out.push(
            label,
            "mean_std_error",
            r.mean_std_error,
            "1",
            Provenance::Derived,
        );
        out.push(
            label,
            "analytic_variance",
            r.analytic_variance,
            "1",
            Provenance::Predicted,
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Report(Report),
    Simulation(Simulation),
}

/// Species catalog from `$ERLAB_SPECIES_FILE`, or the bundled one.
pub fn load_catalog() -> Result<Catalog, CliError> {
    match std::env::var_os(SPECIES_FILE_ENV) {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::io(format_args!("{}", PathBuf::from(&path).display()), e))?;
            Ok(Catalog::from_json(&text)?)
        }
        None => Ok(Catalog::builtin()),
    }
}

pub fn read_records(path: &PathBuf) -> Result<Vec<PublishedRecord>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(parse_published_records(&text)?)
}

pub fn run_command(request: &RunRequest) -> Result<Outcome, CliError> {
    let cmd = &request.command;
    let header = Header::new(cmd.name(), cmd.inputs());
    match cmd {
        Command::SpeciesList => species_list(header).map(Outcome::Report),
        Command::Atomic {
            species,
            density,
            volume,
            temperature,
        } => atomic(
            header,
            species,
            density.si,
            volume.si,
            temperature.as_ref().map(|t| t.si),
        )
        .map(Outcome::Report),
        Command::Squid {
            p,
            temperature,
            tau,
            measured_erl_hbar,
        } => squid(header, *p, temperature.si, tau.si, *measured_erl_hbar).map(Outcome::Report),
        Command::Diamond {
            temperature,
            tau,
            device,
        } => diamond(
            header,
            temperature.si,
            tau.si,
            device.as_ref().map(|(a, b)| (a.si, b.si)),
        )
        .map(Outcome::Report),
        Command::Table1 => table1(header).map(Outcome::Report),
        Command::Table2 { records } => {
            let recs = match records {
                Some(path) => read_records(path)?,
                None => bundled_records(),
            };
            comparison(header, &recs).map(Outcome::Report)
        }
        Command::Compare { records } => {
            comparison(header, &read_records(records)?).map(Outcome::Report)
        }
        Command::Simulate {
            config,
            threads,
            dump,
        } => simulate(header, config, *threads, dump).map(Outcome::Simulation),
    }
}

fn species_list(header: Header) -> Result<Report, CliError> {
    let catalog = load_catalog()?;
    let mut r = Report::new(header, Layout::Wide);
    for s in catalog.iter() {
        let name = s.name();
        let amu = erlab_core::constants().amu;
        r.push(
            name,
            "nuclear_spin",
            s.nuclear_spin().value(),
            "1",
            Provenance::Measured,
        );
        r.push(name, "mass", s.mass() / amu, "amu", Provenance::Measured);
        r.push(
            name,
            "slowing_factor",
            s.slowing_factor(),
            "1",
            Provenance::Derived,
        );
        r.push(
            name,
            "magnetic_moment",
            s.magnetic_moment(),
            "J/T",
            Provenance::Derived,
        );
        if let (Some(sigma), Some(t)) = (s.sd_cross_section(), s.reference_temperature()) {
            r.push(name, "sd_cross_section", sigma, "m^2", Provenance::Derived);
            r.push(name, "reference_temperature", t, "K", Provenance::Derived);
        }
    }
    Ok(r)
}

fn cell(
    species: &str,
    density: f64,
    volume: f64,
    temperature: Option<f64>,
) -> Result<VaporCell, CliError> {
    let catalog = load_catalog()?;
    let s = catalog.get(species)?.clone();
    Ok(match temperature {
        Some(t) => VaporCell::new(s, density, volume, t)?,
        None => VaporCell::at_reference_temperature(s, density, volume)?,
    })
}

fn atomic(
    header: Header,
    species: &str,
    density: f64,
    volume: f64,
    temperature: Option<f64>,
) -> Result<Report, CliError> {
    let cell = cell(species, density, volume, temperature)?;
    let a = atomic_floor(&cell)?;
    let label = cell.species().name().to_string();
    let mut r = Report::new(header, Layout::List);
    let mut push = |q: &str, v: f64, u: &str, p: Provenance| r.push(&label, q, v, u, p);
    use Provenance::{Derived, Predicted};
    push("cell_temperature", cell.cell_temperature(), "K", Derived);
    push("atom_count", a.atom_count, "1", Derived);
    push(
        "mean_relative_velocity",
        a.mean_relative_velocity,
        "m/s",
        Derived,
    );
    push("sigma_v", a.sigma_v, "m^3/s", Derived);
    push("relaxation_time", a.relaxation_time, "s", Predicted);
    push("delta_b", a.delta_b_floor, "T", Predicted);
    push("psd", a.psd, "T/Hz^1/2", Predicted);
    push("erl", a.erl_hbar, "hbar", Predicted);
    push("kappa", a.kappa, "1", Derived);
    push("kappa_bare", a.kappa_bare, "1", Derived);
    push("spin_temperature", a.spin_temperature, "K", Predicted);
    push("correlation_atoms", a.correlation_atoms, "1", Predicted);
    push("correlation_volume", a.correlation_volume, "m^3", Predicted);
    push("collision_time", a.collision_time, "s", Derived);
    push("sd_phase", a.sd_phase, "rad", Derived);
    push(
        "delta_b_uncertainty_check",
        a.delta_b_uncertainty_check,
        "T",
        Derived,
    );
    Ok(r)
}

fn squid(
    header: Header,
    p: f64,
    temperature: f64,
    tau: f64,
    measured: Option<f64>,
) -> Result<Report, CliError> {
    let mut spec = SquidSpec::new(p, temperature, tau)?;
    if let Some(m) = measured {
        spec = spec.with_measured(m)?;
    }
    let predicted = squid_erl(&spec);
    let mut r = Report::new(header, Layout::List);
    r.push(
        "squid",
        "information",
        spec.information(),
        "nat",
        Provenance::Derived,
    );
    r.push("squid", "erl", predicted, "hbar", Provenance::Predicted);
    if let Some(m) = spec.measured_erl_hbar() {
        let ratio = m / predicted;
        r.push("squid", "measured_erl", m, "hbar", Provenance::Measured);
        r.push("squid", "ratio", ratio, "1", Provenance::Derived);
        if ratio < 1.0 {
            r.warnings.push(below_warning("squid", ratio));
        }
    }
    Ok(r)
}

fn below_warning(label: &str, ratio: f64) -> String {
    format!("warning: {label}: measured ERL is below the predicted value (ratio {ratio:.3})")
}

fn diamond(
    header: Header,
    temperature: f64,
    tau: f64,
    device: Option<(f64, f64)>,
) -> Result<Report, CliError> {
    let mut r = Report::new(header, Layout::List);
    match device {
        None => {
            r.push(
                "diamond",
                "erl",
                diamond_erl(temperature, tau)?,
                "hbar",
                Provenance::Predicted,
            );
        }
        Some((psd, volume)) => {
            let d = DiamondSpec::new(temperature, tau, psd, volume)?.report()?;
            r.push(
                "diamond",
                "erl",
                d.optimal_erl_hbar,
                "hbar",
                Provenance::Predicted,
            );
            r.push(
                "diamond",
                "measured_erl",
                d.measured_erl_hbar,
                "hbar",
                Provenance::Measured,
            );
            r.push("diamond", "headroom", d.headroom, "1", Provenance::Derived);
        }
    }
    Ok(r)
}

fn table1(header: Header) -> Result<Report, CliError> {
    let catalog = load_catalog()?;
    let mut r = Report::new(header, Layout::Wide);
    for row in REFERENCE_ROWS {
        let species = catalog.get(row.species)?.clone();
        let cell =
            VaporCell::at_reference_temperature(species, REFERENCE_DENSITY, REFERENCE_VOLUME)?;
        let a = atomic_floor(&cell)?;
        let label = cell.species().name();
        r.push(
            label,
            "delta_b",
            a.delta_b_floor / 1e-17,
            "1e-17 T",
            Provenance::Predicted,
        );
        r.push(label, "erl", a.erl_hbar, "hbar", Provenance::Predicted);
    }
    Ok(r)
}

fn comparison(header: Header, records: &[PublishedRecord]) -> Result<Report, CliError> {
    let rows: Vec<ComparisonRow> = compare_published(records)?;
    let mut r = Report::new(header, Layout::Wide);
    for c in &rows {
        let l = c.label.as_str();
        r.push(l, "p", c.p, "1", Provenance::Measured);
        r.push(l, "T_K", c.t_k, "K", Provenance::Measured);
        r.push(l, "tau_s", c.tau_s, "s", Provenance::Measured);
        r.push(
            l,
            "predicted_erl_hbar",
            c.predicted_erl_hbar,
            "hbar",
            Provenance::Predicted,
        );
        r.push(
            l,
            "measured_erl_hbar",
            c.measured_erl_hbar,
            "hbar",
            Provenance::Measured,
        );
        r.push(l, "ratio", c.ratio, "1", Provenance::Derived);
        if c.below_prediction() {
            r.warnings.push(below_warning(l, c.ratio));
        }
    }
    Ok(r)
}

fn simulate(
    header: Header,
    config: &SimConfig,
    threads: Option<usize>,
    dump: &[u64],
) -> Result<Simulation, CliError> {
    let run = || -> Result<Simulation, CliError> {
        let result = simulate_transient(config)?;
        let trajectories = dump
            .iter()
            .map(|&i| {
                if i >= config.trajectory_count {
                    return Err(CliError::Validation(format!(
                        "invalid dump trajectory: index {i} is outside 0..{}",
                        config.trajectory_count
                    )));
                }
                Ok((i, trajectory(config, i)?))
            })
            .collect::<Result<_, _>>()?;
        Ok(Simulation {
            header,
            report: result.report(config),
            trajectories,
        })
    };
    match threads {
        None => run(),
        Some(0) => Err(CliError::Validation("invalid threads: must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?
            .install(run),
    }
}
