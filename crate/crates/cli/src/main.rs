//! `psforge <mode> --config <path> [--out <dir>]`

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{JobConfig, Mode};
use run::RunError;

#[derive(Parser, Debug)]
#[command(
    name = "psforge",
    version,
    about = "Discrete pseudospherical surfaces from potentials"
)]
struct Cli {
    /// What to do with the configured job.
    #[arg(value_enum)]
    mode: Mode,
    /// JSON job description.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the one in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), RunError> {
    let Ok(raw) = std::env::var("PSFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        RunError::Config(format!(
            "PSFORGE_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| RunError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), RunError> {
    configure_threads()?;
    let text = std::fs::read_to_string(&cli.config).map_err(|source| RunError::Io {
        path: cli.config.display().to_string(),
        source,
    })?;
    let job = JobConfig::parse(&text)
        .and_then(|c| c.into_job(cli.mode, cli.out))
        .map_err(RunError::Config)?;
    let outcome = run::execute(&job)?;
    run::write_artifacts(&job.out_dir, &outcome.artifacts)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    match outcome.failure {
        Some(msg) => Err(RunError::Residual(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("psforge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
