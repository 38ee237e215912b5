use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};
use zeno_scenario::report;
use zeno_scenario::{presets, run_scenario, ScenarioConfig, ScenarioError};

/// Zeno blockade simulator for a driven two-mode system with cross-Kerr coupling.
#[derive(Parser)]
#[command(name = "zeno-blockade", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the master equation and write probabilities, Wigner function and summary.
    Simulate(SimulateArgs),
    /// Subspace analysis.
    Zeno {
        #[command(subcommand)]
        command: ZenoCommand,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(Subcommand)]
enum ZenoCommand {
    /// Write spectrum.json, partition.json and torus.csv.
    Report(Source),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// TOML config, or JSON (a previous summary.json reproduces its run).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Built-in scenario.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Args)]
struct Source {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_name = "N")]
    cutoff_a: Option<usize>,
    #[arg(long, value_name = "N")]
    cutoff_b: Option<usize>,
    #[arg(long, value_name = "N")]
    dt_per_period: Option<u32>,
}

fn load(input: &Input) -> Result<ScenarioConfig, ScenarioError> {
    match (&input.config, &input.preset) {
        (Some(path), _) => ScenarioConfig::load(path),
        (None, Some(name)) => {
            presets::preset(name)?;
            Ok(ScenarioConfig {
                preset: Some(name.clone()),
                ..ScenarioConfig::default()
            })
        }
        (None, None) => Err(ScenarioError::validation("either --config or --preset is required")),
    }
}

fn simulate(args: &SimulateArgs) -> Result<i32, ScenarioError> {
    let mut cfg = load(&args.source.input)?;
    let mut explicit = ScenarioConfig::default();
    explicit.cutoffs.optical = args.cutoff_a;
    explicit.cutoffs.mechanical = args.cutoff_b;
    explicit.integrator.dt_per_period = args.dt_per_period;
    cfg.overlay(&explicit);
    let outcome = run_scenario(&cfg, &args.source.out)?;
    for (label, run) in &outcome.runs {
        match run {
            Ok(o) => {
                let s = &o.summary;
                info!(
                    "{label}: P = {:?}, fidelity(|{}>) = {:.4}, negativity volume = {:.3e} -> {}",
                    s.final_probabilities
                        .iter()
                        .take(4)
                        .map(|p| format!("{p:.4}"))
                        .collect::<Vec<_>>(),
                    s.fidelity.target,
                    s.fidelity.value,
                    s.wigner.negativity_volume,
                    o.dir.display()
                );
            }
            Err(e) => error!("{label}: {e}"),
        }
    }
    if let Some(msg) = outcome.first_error() {
        error!("{msg}");
    }
    Ok(outcome.exit_code())
}

fn zeno_report(source: &Source) -> Result<i32, ScenarioError> {
    let cfg = load(&source.input)?;
    let r = report::zeno_report(&cfg, &source.out)?;
    info!(
        "{} classes over {} states -> {}",
        r.partition.len(),
        r.spectrum.entries.len(),
        source.out.display()
    );
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Zeno {
            command: ZenoCommand::Report(source),
        } => zeno_report(source),
        Command::Presets => {
            for name in presets::NAMES {
                println!("{name}");
            }
            Ok(0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
