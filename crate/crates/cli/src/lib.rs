//! File formats, reports and the `rasch-doe` command-line front end.

pub mod commands;
pub mod error;
pub mod files;
pub mod format;
pub mod manifest;

use std::io::Write;

use clap::Parser;

use commands::{Cli, Command, Outcome};
use error::{CliError, Result};
use manifest::RunManifest;

/// Parse `args` (program name first) and run the command.
///
/// Without `--out` the result goes to `out` and the manifest to `log`; with
/// it, every file plus `manifest.json` is written into the directory.
pub fn run(args: &[String], out: &mut dyn Write, log: &mut dyn Write) -> Result<()> {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            write!(out, "{e}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Args(e.render().to_string())),
    };
    if cli.threads == 0 {
        return Err(CliError::usage("--threads must be at least 1"));
    }
    let name = match &cli.command {
        Command::Inequalities(_) => "inequalities",
        Command::Optimize(_) => "optimize",
        Command::Certify(_) => "certify",
        Command::CenterPath(_) => "center-path",
        Command::RegionSlice(_) => "region-slice",
        Command::Probe(_) => "probe",
        Command::Compare(_) => "compare",
        Command::Symmetry(_) => "symmetry",
    };
    let mut manifest = RunManifest::new(name, &args[1.min(args.len())..]);
    manifest.threads = cli.threads;
    let outcome: Outcome = match &cli.command {
        Command::Inequalities(a) => commands::inequalities(a, &mut manifest)?,
        Command::Optimize(a) => commands::optimize(a, &mut manifest)?,
        Command::Certify(a) => commands::certify(a, &mut manifest)?,
        Command::CenterPath(a) => commands::center_path(a, cli.threads, &mut manifest)?,
        Command::RegionSlice(a) => commands::region_slice(a, cli.threads, &mut manifest)?,
        Command::Probe(a) => commands::probe(a, &mut manifest)?,
        Command::Compare(a) => commands::compare(a, cli.threads, &mut manifest)?,
        Command::Symmetry(a) => commands::symmetry(a, &mut manifest)?,
    };
    match &cli.out {
        Some(dir) => {
            for (file, text) in &outcome.files {
                files::write_text(&dir.join(file), text)?;
                manifest.outputs.push(file.clone());
            }
            files::write_text(&dir.join("manifest.json"), &files::to_json_string(&manifest))?;
        }
        None => {
            out.write_all(outcome.stdout.as_bytes())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
            log.write_all(files::to_json_string(&manifest).as_bytes())
                .map_err(|source| CliError::Io { path: "<stderr>".into(), source })?;
        }
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
