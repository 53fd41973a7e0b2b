use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mzi_modes::cli::{run, Command, Format, ScenarioConfig};
use mzi_modes::Error;

/// Two-photon interferometry scenarios: fringes, Fisher information,
/// simulated detection and phase estimation.
#[derive(Parser)]
#[command(name = "mzi-modes", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// RNG seed (overrides `seed` in the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Flat `key = value` scenario file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, default_value = "csv")]
    format: Format,

    /// Override a config key, e.g. `-p d="1.64 sigma"`.
    #[arg(short = 'p', long = "param", global = true, value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Coincidence and double-count fringes.
    Fringes,
    /// Enhancement ratio over visibility and phase.
    Enhancement,
    /// Pair, R/L-resolved and quantum Fisher information.
    Qfi,
    /// Fringes of the optimal spatial measurement.
    OptimalFringes,
    /// Fisher information of position-resolved detection.
    SpatialFisher,
    /// Sample detection events.
    Simulate,
    /// Subset phase estimation and precision.
    Estimate,
    /// Maximum-likelihood fit of phase and visibility.
    Mlfit,
    /// Two photons plus one: fringes and Fisher information.
    ThreePhoton,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Fringes => Command::Fringes,
            Sub::Enhancement => Command::Enhancement,
            Sub::Qfi => Command::Qfi,
            Sub::OptimalFringes => Command::OptimalFringes,
            Sub::SpatialFisher => Command::SpatialFisher,
            Sub::Simulate => Command::Simulate,
            Sub::Estimate => Command::Estimate,
            Sub::Mlfit => Command::Mlfit,
            Sub::ThreePhoton => Command::ThreePhoton,
        }
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
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> mzi_modes::Result<()> {
    let mut config = match &cli.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::default(),
    };
    for p in &cli.params {
        config.set_pair(p)?;
    }
    if let Some(seed) = cli.seed {
        config.set("seed", &seed.to_string())?;
    }
    let command = Command::from(cli.command);
    match &cli.out {
        Some(path) => {
            let io_err = |source| Error::Io {
                path: path.clone(),
                source,
            };
            let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
            run(command, &config, cli.format, &mut w)?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            run(command, &config, cli.format, &mut w)
        }
    }
}
