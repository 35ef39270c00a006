use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use orbitlab::{run, Options, EXIT_UNKNOWN_COMMAND};

/// Run an arithmetic dynamics experiment described by a TOML manifest and
/// write a JSON report.
#[derive(Parser, Debug)]
#[command(name = "orbitlab", version)]
struct Cli {
    /// Experiment manifest.
    #[arg(long, value_name = "PATH")]
    manifest: PathBuf,
    /// Write the report here instead of stdout (overrides the manifest's `out`).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// p-adic precision M; overrides the manifest and ORBITLAB_PRECISION.
    #[arg(long, value_name = "M")]
    precision: Option<i64>,
    /// Seed for randomized sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Compact JSON (the default).
    #[arg(long, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON.
    #[arg(long)]
    pretty: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_UNKNOWN_COMMAND } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if cli.precision.is_some_and(|m| m <= 0) {
        eprintln!("error: --precision must be positive");
        return ExitCode::from(EXIT_UNKNOWN_COMMAND as u8);
    }
    let opts = Options { manifest: cli.manifest, out: cli.out, precision: cli.precision, seed: cli.seed, pretty: cli.pretty };
    let outcome = run(&opts);
    let written = match &outcome.out {
        Some(path) => std::fs::write(path, &outcome.report),
        None => std::io::stdout().write_all(outcome.report.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(74);
    }
    if outcome.code != 0 {
        eprintln!("orbitlab: exit {}", outcome.code);
    }
    ExitCode::from(outcome.code as u8)
}
