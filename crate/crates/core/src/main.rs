use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mipt::harness::{
    parse_config, run_clusters, run_collapse, run_experiment, run_fit, run_perc, selftest, CollapseSpec, FitSpec,
    PercSpec,
};
use mipt::protocol::ExperimentConfig;
use mipt::Error;

#[derive(Parser)]
#[command(name = "mipt", version, about = "Hybrid Clifford circuit simulations and finite-size scaling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment or analysis spec (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Overrides the master seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run trajectories and write aggregated observables.
    Run,
    /// Collapse an observable across sizes.
    Collapse,
    /// Power-law fit of an observable against L.
    Fit,
    /// Run trajectories and analyse final-state cluster sizes.
    Clusters,
    /// Classical percolation scan.
    Perc,
    /// Internal consistency checks.
    Selftest,
}

fn read_spec<T>(path: &Option<PathBuf>, parse: fn(&str) -> mipt::Result<T>) -> mipt::Result<T> {
    let path = path.as_deref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn experiment(cli: &Cli) -> mipt::Result<ExperimentConfig> {
    let path: &Path = cli.config.as_deref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut cfg = parse_config(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn print_json<T: serde::Serialize>(value: &T) -> mipt::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: &Cli) -> mipt::Result<bool> {
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match cli.command {
        Command::Run => print_json(&run_experiment(&experiment(cli)?, workers, &cli.out)?)?,
        Command::Clusters => print_json(&run_clusters(&experiment(cli)?, workers, &cli.out)?)?,
        Command::Collapse => print_json(&run_collapse(&read_spec(&cli.config, CollapseSpec::parse)?, &cli.out)?)?,
        Command::Fit => print_json(&run_fit(&read_spec(&cli.config, FitSpec::parse)?, &cli.out)?)?,
        Command::Perc => {
            let mut spec = read_spec(&cli.config, PercSpec::parse)?;
            if let Some(s) = cli.seed {
                spec.seed = s;
            }
            print_json(&run_perc(&spec, workers, &cli.out)?)?
        }
        Command::Selftest => {
            let checks = selftest(cli.seed.unwrap_or(0));
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
