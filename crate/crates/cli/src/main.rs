use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use superatom_cli::config::{parse_config_file, resolve, CliOverrides, Mode};
use superatom_cli::{run, CliError};

/// Quantum-trajectory experiment runner for a driven cavity coupled to a
/// Rydberg-blocked atomic ensemble.
#[derive(Parser)]
#[command(name = "superatom", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state probe sweep: spectrum.csv
    Spectrum(CommonArgs),
    /// One stochastic trajectory: record.csv, clicks.csv
    Trajectory(CommonArgs),
    /// Averaged trajectory ensemble: record.csv, clicks.csv, bursts.csv
    Ensemble(CommonArgs),
    /// Master-equation propagation: record.csv
    Master(CommonArgs),
    /// Excitation-block eigenvalues: eigenvalues.csv
    LadderSpectrum(CommonArgs),
    /// Run a bundled drive preset (fig3..fig6), default mode trajectory
    Preset {
        /// fig3 | fig4 | fig5 | fig6
        name: String,
        #[command(flatten)]
        args: CommonArgs,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Config file: TOML, or manifest.json from a previous run
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed (overrides [trajectory].seed)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker pool size for ensembles and sweeps
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Drive preset fig3..fig6 (overwrites alpha and delta_probe)
    #[arg(long)]
    preset: Option<String>,
    /// Ensemble size M
    #[arg(long)]
    trajectories: Option<usize>,
    /// Total simulated time per trajectory [us]
    #[arg(long)]
    t_final: Option<f64>,
    /// Address the lower dressed branch (negative preset detuning)
    #[arg(long)]
    lower_branch: bool,
    /// Set the probe amplitude to zero at the first cavity click
    #[arg(long)]
    quench: bool,
    /// Spectrum sweep lower bound [MHz]
    #[arg(long, allow_negative_numbers = true)]
    delta_min: Option<f64>,
    /// Spectrum sweep upper bound [MHz]
    #[arg(long, allow_negative_numbers = true)]
    delta_max: Option<f64>,
    /// Spectrum sweep point count
    #[arg(long)]
    points: Option<usize>,
}

fn overrides(mode: Option<Mode>, args: &CommonArgs, preset: Option<String>) -> CliOverrides {
    CliOverrides {
        mode,
        preset: preset.or_else(|| args.preset.clone()),
        seed: args.seed,
        workers: args.workers,
        output_dir: args.out.clone(),
        trajectories: args.trajectories,
        lower_branch: args.lower_branch,
        quench: args.quench,
        delta_min: args.delta_min,
        delta_max: args.delta_max,
        points: args.points,
        t_final: args.t_final,
    }
}

fn execute(command: &Command) -> Result<(), CliError> {
    let (args, cli) = match command {
        Command::Spectrum(args) => (args, overrides(Some(Mode::Spectrum), args, None)),
        Command::Trajectory(args) => (args, overrides(Some(Mode::Trajectory), args, None)),
        Command::Ensemble(args) => (args, overrides(Some(Mode::Ensemble), args, None)),
        Command::Master(args) => (args, overrides(Some(Mode::Master), args, None)),
        Command::LadderSpectrum(args) => (args, overrides(Some(Mode::LadderSpectrum), args, None)),
        Command::Preset { name, args } => (args, overrides(None, args, Some(name.clone()))),
    };
    let file = match &args.config {
        Some(path) => Some(parse_config_file(path)?),
        None => None,
    };
    let cfg = resolve(file, &cli)?;
    let files = run(&cfg)?;
    println!("wrote {} to {}", files.join(", "), cfg.output_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code())
        }
    }
}
