//! `dfl`: run experiments, parameter sweeps, and the crafting oracle suite.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error,
//! 3 oracle failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use dfl_core::config::ExperimentConfig;
use dfl_core::reporting::{run_sweep, write_records, write_sweep, SweepParameter, SweepSpec};
use dfl_core::verify::{verify_all, Crafters};
use dfl_core::Execution;

#[derive(Parser)]
#[command(
    name = "dfl",
    version,
    about = "Decentralized federated learning with selfish clients"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment; writes records.csv and summary.json.
    Run {
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long, env = "DFL_SEED")]
        seed: Option<u64>,
        /// Output directory; defaults to the config's `output`, then `results`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the experiment for each value of one parameter.
    Sweep {
        config: PathBuf,
        /// One of lambda, rho, selfish_fraction, epsilon, interval, num_clients.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        /// Cells run at once.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, env = "DFL_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the crafting formulas against independent oracles.
    Verify {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
    Verify,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
            Failure::Verify => 3,
        }
    }
}

fn config_err<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Config(e.into())
}

fn runtime_err<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Runtime(e.into())
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))
        .map_err(config_err)?;
    let mut cfg = ExperimentConfig::from_json(&text)
        .with_context(|| format!("invalid config {}", path.display()))
        .map_err(config_err)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.validate()
        .with_context(|| format!("invalid config {}", path.display()))
        .map_err(config_err)?;
    Ok(cfg)
}

fn output_dir(out: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    out.or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create {}", dir.display()))
        .map_err(runtime_err)
}

fn cmd_run(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = load_config(config, seed)?;
    let dir = output_dir(out, &cfg);
    let mut sim = cfg.build().map_err(runtime_err)?;
    let records = sim.run().map_err(runtime_err)?;
    create_dir(&dir)?;
    write_records(&records, &dir.join("records.csv")).map_err(runtime_err)?;

    let summary = serde_json::json!({
        "config": cfg,
        "rounds": records.len(),
        "attack_started_at": sim.detector().and_then(|d| d.started_at()),
        "final": records.last(),
    });
    let path = dir.join("summary.json");
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&summary).map_err(runtime_err)? + "\n",
    )
    .with_context(|| format!("cannot write {}", path.display()))
    .map_err(runtime_err)?;
    if let Some(last) = records.last() {
        println!(
            "round {}: mtas {:.4} mtans {:.4} gap {:.4}",
            last.round, last.mtas, last.mtans, last.gap
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn parse_values(values: &str) -> Result<Vec<f64>, Failure> {
    values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| config_err(anyhow!("bad sweep value '{v}'")))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    config: &Path,
    param: &str,
    values: &str,
    repeats: usize,
    jobs: usize,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let parameter: SweepParameter = param.parse().map_err(config_err)?;
    let spec = SweepSpec::new(parameter, parse_values(values)?, repeats).map_err(config_err)?;
    let cfg = load_config(config, seed)?;
    for &value in &spec.values {
        parameter
            .apply(&cfg, value)
            .with_context(|| format!("{parameter} = {value}"))
            .map_err(config_err)?;
    }
    let dir = output_dir(out, &cfg);
    let result = run_sweep(&cfg, &spec, jobs).map_err(runtime_err)?;
    write_sweep(&result, &dir).map_err(runtime_err)?;
    for (i, value) in spec.values.iter().enumerate() {
        println!(
            "{parameter} = {value}: gap {:.4} mtas {:.4} mtans {:.4}",
            result.summary.mean_gap[i], result.summary.mean_mtas[i], result.summary.mean_mtans[i]
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn cmd_verify(trials: usize, seed: u64) -> Result<(), Failure> {
    let reports = verify_all(trials, seed, &Crafters::default(), Execution::default());
    let mut all_passed = true;
    for report in &reports {
        let counters: Vec<String> = report.counters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!(
            "{} {} ({} trials{}{})",
            if report.passed() { "PASS" } else { "FAIL" },
            report.suite.label(),
            report.trials,
            if counters.is_empty() { "" } else { "; " },
            counters.join(", ")
        );
        if let Some(bad) = &report.first_failure {
            all_passed = false;
            println!("counterexample: {}", serde_json::to_string(bad).map_err(runtime_err)?);
        }
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, seed, out } => cmd_run(&config, seed, out),
        Command::Sweep {
            config,
            param,
            values,
            repeats,
            jobs,
            seed,
            out,
        } => cmd_sweep(&config, &param, &values, repeats, jobs, seed, out),
        Command::Verify { trials, seed } => cmd_verify(trials, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Config(e) | Failure::Runtime(e) => eprintln!("error: {e:#}"),
                Failure::Verify => eprintln!("error: oracle suite failed"),
            }
            ExitCode::from(failure.code())
        }
    }
}
