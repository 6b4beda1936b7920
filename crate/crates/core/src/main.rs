use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twi::harness::{
    load_config, run_experiment, Experiment, ExperimentConfig, Figure, HarnessError, RunOptions, SCHEMA_VERSION,
};
use twi::RandomSeed;

/// Timestamping and event-ordering experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Base seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo trials per point; overrides the config.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct ConfigArg {
    /// Experiment config (JSON).
    config: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate closed-form probabilities and window conditions.
    Analytic(ConfigArg),
    /// Monte-Carlo estimate at a single window.
    Simulate(ConfigArg),
    /// Monte-Carlo estimates over a list of windows.
    Sweep(ConfigArg),
    /// Check ordering bounds against simulation.
    Bounds(ConfigArg),
    /// Latency budgets, window-edge miss probabilities, slot alignment.
    Plan(ConfigArg),
    /// Regenerate a reference figure's data.
    Reproduce {
        /// 7: two-rate chain; 8: exponential window sweep.
        #[arg(long, required_unless_present = "config", conflicts_with = "config")]
        figure: Option<u32>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

const REPRODUCE_TRIALS: u64 = 1_000_000;

fn config_error(field: &str, reason: impl ToString) -> HarnessError {
    HarnessError::Semantic {
        field: field.to_owned(),
        reason: reason.to_string(),
    }
}

fn check_kind(cmd: &Cmd, cfg: &ExperimentConfig) -> Result<(), HarnessError> {
    let ok = match (cmd, &cfg.experiment) {
        (Cmd::Analytic(_), Experiment::Analytic { .. }) => true,
        (Cmd::Simulate(_), Experiment::ChainSim { twi, .. } | Experiment::FanOutSim { twi, .. }) => {
            if twi.windows.len() != 1 {
                return Err(config_error("twi.windows", "simulate takes one window; use sweep for several"));
            }
            true
        }
        (Cmd::Sweep(_), Experiment::ChainSim { .. } | Experiment::FanOutSim { .. }) => true,
        (Cmd::Bounds(_), Experiment::BoundsCheck { .. }) => true,
        (Cmd::Plan(_), Experiment::Plan(_)) => true,
        (Cmd::Reproduce { .. }, Experiment::Reproduce { .. }) => true,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(config_error(
            "kind",
            format!("`{}` cannot be run by this subcommand", cfg.experiment.kind_name()),
        ))
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &cli.command {
        Cmd::Analytic(a) | Cmd::Simulate(a) | Cmd::Sweep(a) | Cmd::Bounds(a) | Cmd::Plan(a) => load_config(&a.config)?,
        Cmd::Reproduce { config: Some(path), .. } => load_config(path)?,
        Cmd::Reproduce { figure, .. } => {
            let figure = Figure::try_from(figure.unwrap_or_default()).map_err(|e| config_error("figure", e))?;
            ExperimentConfig {
                schema_version: SCHEMA_VERSION,
                experiment: Experiment::Reproduce { figure },
                trials: REPRODUCE_TRIALS,
                seed: RandomSeed(0),
                output_path: format!("results/fig{}", u32::from(figure)),
            }
        }
    };
    check_kind(&cli.command, &cfg)?;
    if let Some(seed) = cli.seed {
        cfg.seed = RandomSeed(seed);
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(out) = &cli.out {
        cfg.output_path = out.display().to_string();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(&cli).and_then(|cfg| run_experiment(&cfg, &RunOptions { threads: cli.threads }));
    match result {
        Ok(report) => {
            let m = &report.manifest;
            println!(
                "{} rows ({} failed) in {:.3} s -> {}",
                m.rows,
                m.failed_rows,
                m.wall_time_secs,
                report.csv_path.display()
            );
            println!("manifest: {}", report.manifest_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
