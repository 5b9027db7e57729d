use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use resetctl::{execute, CliError, ExperimentConfig, Kind};

#[derive(Parser)]
#[command(name = "resetctl", version, about = "Evolve-and-reset control experiments")]
struct Cli {
    /// TOML configuration; defaults apply to every missing field.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Fock cutoff of the main model (overrides `model.cutoff`).
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Effective Hamiltonian of the configured model.
    Effective,
    /// Sampled trajectories with purity, fidelity and quadratures.
    Simulate,
    /// Fidelity to the effective evolution for each reset rate.
    Fig1,
    /// Product-formula convergence ladder.
    Chernoff,
    /// Deviation growth against time and reset rate.
    Dissipative,
    /// Mid-cycle deviation against its first-order prediction.
    Strobe,
    /// Continuous damping towards the reset state.
    Gradual,
    /// Dimension of the Lie algebra generated by effective Hamiltonians.
    Lie,
    /// Print the resolved configuration as TOML.
    PrintConfig,
}

fn kind(c: Command) -> Option<Kind> {
    Some(match c {
        Command::Effective => Kind::Effective,
        Command::Simulate => Kind::Simulate,
        Command::Fig1 => Kind::Fig1,
        Command::Chernoff => Kind::Chernoff,
        Command::Dissipative => Kind::Dissipative,
        Command::Strobe => Kind::Strobe,
        Command::Gradual => Kind::Gradual,
        Command::Lie => Kind::Lie,
        Command::PrintConfig => return None,
    })
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(dir) = &cli.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(c) = cli.cutoff {
        cfg.model.cutoff = c;
    }
    Ok(cfg)
}

fn main_inner(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let Some(kind) = kind(cli.command) else {
        print!("{}", cfg.to_toml());
        return Ok(());
    };
    let outcome = execute(&cfg, kind, &cfg.output.dir)?;
    if !cli.quiet {
        print!("{}", outcome.summary);
        println!("wrote {}", cfg.output.dir.join(format!("{}.csv", kind.name())).display());
    }
    if !outcome.violations.is_empty() {
        return Err(CliError::Invariant(outcome.violations.join("; ")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
