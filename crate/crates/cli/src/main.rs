use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qar_cli::{run, CliError, Command, ModelConfig, RunOptions};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    /// Steady state, currents, noise and bounds at one parameter point.
    Steady,
    /// Steady columns over a one- or two-dimensional grid.
    Sweep,
    /// Thermalization time of the single-reservoir relaxation.
    Dynamics,
    /// Reaction-coordinate parameters and sampled densities.
    Rcmap,
    /// Three-level model: numeric, analytic and laser-driven values.
    Reduced,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Steady => Command::Steady,
            Cmd::Sweep => Command::Sweep,
            Cmd::Dynamics => Command::Dynamics,
            Cmd::Rcmap => Command::Rcmap,
            Cmd::Reduced => Command::Reduced,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qar", version, about = "Collective-spin absorption refrigerator simulator")]
struct Args {
    command: Cmd,
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output CSV path; standard output by default.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweep points.
    #[arg(long)]
    workers: Option<usize>,
    /// Use the three-level model for steady and sweep.
    #[arg(long)]
    reduced: bool,
}

fn execute(args: &Args) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            ModelConfig::from_text(&text)?
        }
        None => ModelConfig::default(),
    };
    for s in &args.set {
        config.apply_override(s)?;
    }
    if args.workers.is_some() {
        config.workers = args.workers;
    }
    let out = args.out.clone().or_else(|| config.out.as_ref().map(PathBuf::from));
    let table = run(args.command.into(), &config, RunOptions { reduced: args.reduced })?;
    table.write(out.as_deref())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qar: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
