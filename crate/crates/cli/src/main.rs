use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bq_core::report::{run, Command, Report};
use bq_core::scenario::Scenario;
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Verify scenario files of inertial classes and emit reports.
///
/// Exit status: 0 when every check passes, 1 when a check fails,
/// 2 on usage or input errors.
#[derive(Debug, Parser)]
#[command(name = "bq", version)]
struct Args {
    /// enumerate, quotient, packets, kl, diagram, geomequiv or verify-all
    command: String,
    #[arg(long)]
    scenario: PathBuf,
    /// Also write `<name>.<command>.json` and `.txt` here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Replaces the scenario's angle denominator.
    #[arg(long)]
    sample_denominator: Option<u32>,
    /// Reserved. Nothing is random; only "none" is accepted.
    #[arg(long)]
    seed: Option<String>,
}

fn write_atomic(path: &Path, body: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    f.write_all(body.as_bytes())?;
    f.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn execute(args: &Args) -> Result<Report> {
    if let Some(s) = &args.seed {
        if s != "none" {
            bail!("--seed is reserved: there is no randomness, only \"none\" is accepted");
        }
    }
    if args.sample_denominator == Some(0) {
        bail!("--sample-denominator must be positive");
    }
    let cmd: Command = args.command.parse()?;
    let sc = Scenario::load(&args.scenario)?.with_denominator(args.sample_denominator);
    let report = run(cmd, &sc).with_context(|| format!("{} on {}", cmd.name(), sc.name))?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let stem = format!("{}.{}", sc.name, cmd.name());
        write_atomic(&dir.join(format!("{stem}.json")), &report.to_json())?;
        write_atomic(&dir.join(format!("{stem}.txt")), &report.to_text())?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(report) => {
            let body = match args.format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            print!("{body}");
            if report.passed {
                ExitCode::SUCCESS
            } else {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    eprintln!("failed: {}: {}", c.name, c.detail);
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
