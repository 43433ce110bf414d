//! Command-line front end for `erlab-core`.
//!
//! Every sub-command maps a [`RunRequest`] onto one library operation and
//! renders the result as an aligned text table, CSV or JSON.

mod args;
mod error;
pub mod report;
pub mod request;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::Parser;

pub use args::Cli;
pub use error::CliError;
pub use report::{Header, Layout, Provenance, Report, Row};
pub use request::{
    run_command, Command, Outcome, OutputFormat, QuantityArg, RunRequest, Simulation,
};

/// Render an outcome in the requested format.
pub fn render(
    outcome: &Outcome,
    format: OutputFormat,
    precision: usize,
) -> Result<String, CliError> {
    match (outcome, format) {
        (Outcome::Report(r), OutputFormat::Text) => Ok(r.to_text(precision)),
        (Outcome::Report(r), OutputFormat::Csv) => r.to_csv(precision),
        (Outcome::Report(r), OutputFormat::Json) => r.to_json(precision),
        (Outcome::Simulation(s), OutputFormat::Json) => report::to_json(&s.rounded(precision)),
        (Outcome::Simulation(s), OutputFormat::Text) => Ok(s.to_report().to_text(precision)),
        (Outcome::Simulation(s), OutputFormat::Csv) => s.to_report().to_csv(precision),
    }
}

fn trajectory_csv(points: &[erlab_core::sim::TrajectoryPoint]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for p in points {
        w.serialize(p)
            .map_err(|e| CliError::Io(format!("csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| CliError::Io(format!("csv: {e}")))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path.display(), e))
}

/// Parse, run and emit; returns the process exit status.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let text = e.render().to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            let _ = writeln!(stderr, "{}", CliError::Usage(first.to_string()));
            return 1;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let (request, dump_dir) = cli.into_request()?;
    let outcome = run_command(&request)?;
    if let Outcome::Report(r) = &outcome {
        for w in &r.warnings {
            let _ = writeln!(stderr, "{w}");
        }
    }
    if let (Outcome::Simulation(s), Some(dir)) = (&outcome, dump_dir) {
        for (i, points) in &s.trajectories {
            write_file(
                &dir.join(format!("trajectory_{i}.csv")),
                &trajectory_csv(points)?,
            )?;
        }
    }
    let text = render(&outcome, request.format, request.precision)?;
    match &request.output {
        Some(path) => write_file(path, text.as_bytes()),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("stdout", e)),
    }
}
