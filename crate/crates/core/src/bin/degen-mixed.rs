use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use degen_mixed::cli::{execute, Command, Overrides, RunConfig};
use degen_mixed::dae::Scheme;

#[derive(Parser)]
#[command(name = "degen-mixed", version, about = "Certify and integrate degenerate parabolic mixed systems")]
struct Cli {
    #[command(subcommand)]
    command: Action,
}

#[derive(Subcommand)]
enum Action {
    /// Check the well-posedness hypotheses and write certificate.json
    Certify(Args),
    /// Certify, time-step, and write trajectory.csv and energy.json
    Run(Args),
    /// Mesh and step refinement studies written to rates.csv
    Convergence(Args),
    /// Run every built-in problem once
    Demo(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    /// Mesh size; a comma-separated list for `convergence`
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// backward-euler (be) or crank-nicolson (cn)
    #[arg(long)]
    scheme: Option<Scheme>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Action::Certify(a) => (Command::Certify, a),
        Action::Run(a) => (Command::Run, a),
        Action::Convergence(a) => (Command::Convergence, a),
        Action::Demo(a) => (Command::Demo, a),
    };
    let mut config = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match RunConfig::from_json(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            },
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(1);
            }
        },
        None => RunConfig::default(),
    };
    let overrides = Overrides {
        dt: args.dt,
        k: args.k,
        scheme: args.scheme,
        out: args.out,
    };
    overrides.apply(command, &mut config);
    match execute(command, &config) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
