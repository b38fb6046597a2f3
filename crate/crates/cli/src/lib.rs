//! Experiment harness over `vilenkin-core`: argument and config resolution,
//! the per-subcommand runners, and CSV/JSON reports.

pub mod config;
pub mod experiments;
pub mod report;

use std::io::Write;

use clap::Parser;

pub use config::{Cli, Settings};
pub use experiments::{execute, run_report, RunOutput};
pub use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] vilenkin_core::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Parses `args`, runs the experiment, writes its output and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(&cli, stdout, stderr) {
        Ok(0) => EXIT_OK,
        Ok(_) => EXIT_VIOLATION,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<usize, CliError> {
    let settings = Settings::resolve(cli)?;
    let started = std::time::Instant::now();
    let output = execute(&settings)?;
    match &settings.out {
        Some(path) => std::fs::write(path, &output.document)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => stdout
            .write_all(output.document.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?,
    }
    for note in &output.notes {
        let _ = writeln!(stderr, "{note}");
    }
    // Wall time stays out of the document so reruns are byte-identical.
    let _ = writeln!(
        stderr,
        "{}: {} violation(s), {:.3}s",
        settings.experiment,
        output.violations,
        started.elapsed().as_secs_f64()
    );
    Ok(output.violations)
}
