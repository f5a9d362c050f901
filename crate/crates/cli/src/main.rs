//! `spinc`: symbolic and numeric checks of the Bergman kernel expansion.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Command;
use config::{RunConfig, CONFIG_ENV};

#[derive(Parser)]
#[command(name = "spinc", version, about = "Bergman kernel coefficients: symbolic derivation and numerical checks")]
struct Cli {
    #[command(subcommand)]
    command: CommandArg,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum CommandArg {
    /// Derive b1 and print every intermediate of the expansion.
    SymbolicB1,
    /// Validate the identity rules on random exact geometries.
    CheckIdentities,
    /// Spectra of the model operators and the normal-ordering oracle.
    ModelSpectrum,
    /// Bergman and heat kernels against their matrix evaluations.
    ModelKernels,
    /// Landau clusters and gaps of the magnetic Laplacian on a torus.
    TorusGap,
    /// All of the above.
    Report,
}

#[derive(Args, Default)]
struct Overrides {
    /// Configuration file (flat `key = value`).
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Complex dimension.
    #[arg(long, global = true)]
    n: Option<String>,
    /// Maximal total occupation of the Fock basis.
    #[arg(long, global = true)]
    cutoff: Option<String>,
    /// Curvature eigenvalues, e.g. `-2pi,4pi`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<String>,
    /// Torus fluxes, e.g. `1..5` or `1,3`.
    #[arg(long, global = true)]
    flux: Option<String>,
    /// Torus grid points per axis.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Tolerance of closed forms against numerical oracles.
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Identity rule file replacing the bundled one.
    #[arg(long, global = true)]
    rules: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    trials: Option<String>,
    #[arg(long, global = true)]
    instances: Option<String>,
    #[arg(long, global = true)]
    json_out: Option<String>,
    #[arg(long, global = true)]
    csv_out: Option<String>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), config::ConfigError> {
        let pairs = [
            ("n", &self.n),
            ("cutoff", &self.cutoff),
            ("a", &self.a),
            ("flux", &self.flux),
            ("grid", &self.grid),
            ("tol", &self.tol),
            ("rules", &self.rules),
            ("seed", &self.seed),
            ("trials", &self.trials),
            ("instances", &self.instances),
            ("json_out", &self.json_out),
            ("csv_out", &self.csv_out),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(())
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    let mut cfg = match &cli.overrides.config {
        Some(path) => RunConfig::load(path).map_err(|e| e.to_string())?,
        None => RunConfig::default(),
    };
    cli.overrides.apply(&mut cfg).map_err(|e| e.to_string())?;
    cfg.validate().map_err(|e| e.to_string())?;
    let command = match cli.command {
        CommandArg::SymbolicB1 => Command::SymbolicB1,
        CommandArg::CheckIdentities => Command::CheckIdentities,
        CommandArg::ModelSpectrum => Command::ModelSpectrum,
        CommandArg::ModelKernels => Command::ModelKernels,
        CommandArg::TorusGap => Command::TorusGap,
        CommandArg::Report => Command::Report,
    };
    let mut stdout = std::io::stdout().lock();
    let doc = commands::execute(command, &cfg, &mut stdout).map_err(|e| e.to_string())?;
    if let Some(path) = &cfg.json_out {
        std::fs::write(path, doc.to_json()).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if let Some(path) = &cfg.csv_out {
        let csv = doc.to_csv().map_err(|e| e.to_string())?;
        std::fs::write(path, csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(doc.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("spinc: {msg}");
            ExitCode::from(2)
        }
    }
}
