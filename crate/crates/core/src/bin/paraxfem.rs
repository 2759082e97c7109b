use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use paraxfem::cli::{execute, parse_config, Experiment, EXIT_INCOMPLETE, EXIT_OK, EXIT_USAGE};
use paraxfem::harness::{thread_cap, THREADS_ENV};

/// Finite-element experiments for paraxial wave and parabolic problems with
/// dynamical boundary conditions.
#[derive(Parser)]
#[command(name = "paraxfem", version, after_help = format!("{THREADS_ENV} caps the number of worker threads."))]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Manufactured-solution convergence study.
    Converge(Paths),
    /// Wedge transmission-loss runs.
    Wedge(Paths),
    /// Norm growth over the bottom-profile catalogue.
    Growth(Paths),
    /// A single manufactured run.
    Solve(Paths),
}

#[derive(Args)]
struct Paths {
    /// Sectioned key = value run description.
    #[arg(long)]
    config: PathBuf,
    /// Directory for CSV reports and the manifest.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (experiment, paths) = match cli.command {
        Command::Converge(p) => (Experiment::Converge, p),
        Command::Wedge(p) => (Experiment::Wedge, p),
        Command::Growth(p) => (Experiment::Growth, p),
        Command::Solve(p) => (Experiment::Solve, p),
    };
    let text = match std::fs::read_to_string(&paths.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", paths.config.display());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let config = match parse_config(&text, experiment) {
        Ok(c) => c,
        Err(e) => {
            let sep = if e.line == 0 { " " } else { "" };
            eprintln!("error: {}:{sep}{e}", paths.config.display());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    for note in &config.notes {
        eprintln!("note: {}:{note}", paths.config.display());
    }
    match execute(&config, &paths.out, thread_cap()) {
        Ok(o) => {
            for (k, v) in &o.summary {
                eprintln!("{k} = {v}");
            }
            let code = if o.all_completed() {
                EXIT_OK
            } else {
                EXIT_INCOMPLETE
            };
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
