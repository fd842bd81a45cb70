use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vaes_cli::suite::{run_suite, Check, Suite};
use vaes_cli::{cmd_catalog, cmd_classify, cmd_solve, cmd_verify_config, cmd_verify_state, json, CliError, CliResult, RunConfig};

#[derive(Parser)]
#[command(name = "vaes", version, about = "Vector algebra eigenstates: solve, classify and verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// JSON run configuration
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset (see `vaes catalog`)
    #[arg(long)]
    preset: Option<String>,
    /// Seed for random M̃ draws and suites
    #[arg(long)]
    seed: Option<u64>,
}

impl Source {
    fn load(&self) -> CliResult<Option<RunConfig>> {
        match (&self.config, &self.preset) {
            (Some(p), _) => Ok(Some(RunConfig::from_json(&json::read_file(p)?)?)),
            (None, Some(name)) => {
                vaes_cli::presets::find(name)?;
                Ok(Some(RunConfig::preset(name)))
            }
            (None, None) => Ok(None),
        }
    }

    fn require(&self) -> CliResult<RunConfig> {
        self.load()?.ok_or_else(|| CliError::Config("give --config PATH or --preset NAME".into()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify β and M̃ of a configuration
    Classify {
        #[command(flatten)]
        src: Source,
        /// Also write the report (with M̃, eigenvectors and T) as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the vector state and write it as JSON
    Solve {
        #[command(flatten)]
        src: Source,
        /// Output file (stdout if absent)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Relative residual bound
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Verify a state file, a configuration, or run a suite
    Verify {
        /// State file to verify
        state: Option<PathBuf>,
        #[command(flatten)]
        src: Source,
        /// smoke | full
        #[arg(long, conflicts_with_all = ["state", "config", "preset"])]
        suite: Option<String>,
        /// Relative residual bound
        #[arg(long)]
        tol: Option<f64>,
    },
    /// List the presets
    Catalog {
        /// Also write the catalog as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn report(checks: &[Check]) -> CliResult<()> {
    for c in checks {
        println!("{c}");
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(failed.join(", ")))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Classify { src, out } => {
            let rep = cmd_classify(&src.require()?, src.seed)?;
            print!("{}", rep.text());
            if let Some(p) = out {
                json::write_file(&p, &json::to_bytes(&rep)?)?;
            }
            Ok(())
        }
        Command::Solve { src, out, tol } => {
            let s = cmd_solve(&src.require()?, src.seed, tol)?;
            match &out {
                Some(p) => json::write_file(p, &s.bytes)?,
                None => print!("{}", String::from_utf8_lossy(&s.bytes)),
            }
            eprintln!("{}", s.report);
            if s.report.passed {
                Ok(())
            } else {
                Err(CliError::Invariant(format!("eigen-residual: {}", s.report)))
            }
        }
        Command::Verify { state, src, suite, tol } => {
            let checks = if let Some(name) = suite {
                run_suite(Suite::from_name(&name)?, src.seed.unwrap_or(0))?
            } else if let Some(path) = state {
                cmd_verify_state(&json::read_file(&path)?, tol)?
            } else {
                cmd_verify_config(&src.require()?, src.seed, tol)?
            };
            report(&checks)
        }
        Command::Catalog { out } => {
            let (table, bytes) = cmd_catalog()?;
            print!("{table}");
            if let Some(p) = out {
                json::write_file(&p, &bytes)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vaes: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
