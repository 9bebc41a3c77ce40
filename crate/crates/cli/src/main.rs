use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use areal_decomp_cli::commands::{stage, TRACE_FILE};
use areal_decomp_cli::{
    cmd_decompose, cmd_diagnose, cmd_precision, cmd_run, cmd_sample, GridDims, PrecisionSource,
    Report, RunConfig,
};
use clap::{Args, Parser, Subcommand};

/// Bayesian multiresolution decomposition of areal count data.
#[derive(Parser)]
#[command(name = "decomp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the precision matrix in coordinate format.
    Precision {
        #[command(flatten)]
        common: Common,
        /// Adjacency file, overriding the config.
        #[arg(long)]
        adjacency: Option<PathBuf>,
        /// Second-order lattice precision for a ROWSxCOLS grid.
        #[arg(long)]
        grid: Option<GridDims>,
    },
    /// Run the sampler; writes the trace and run report.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decompose a trace into per-level details.
    Decompose {
        #[command(flatten)]
        common: Common,
        /// Trace file; defaults to the one in the output directory.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sample, decompose and write a manifest of hashed outputs.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recompute convergence diagnostics from a trace.
    Diagnose {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

fn load(common: &Common, seed: Option<u64>) -> Result<RunConfig> {
    let mut cfg = stage("config", || match &common.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    })?;
    if let Some(out) = &common.output {
        cfg.output = out.clone();
    }
    if let Some(seed) = seed {
        cfg.hyper.seed = seed;
    }
    Ok(cfg)
}

fn print_report(report: &Report) {
    println!(
        "{} samples, acceptance {:.3}",
        report.samples, report.acceptance.overall
    );
    if let Some(c) = report.truth_correlation {
        println!("correlation with truth {c:.4}");
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Precision { common, adjacency, grid } => {
            let cfg = load(&common, None)?;
            let adjacency = adjacency.or(cfg.adjacency.clone());
            let source = match (grid.or(cfg.grid), &adjacency) {
                (Some(d), _) => PrecisionSource::Grid(d),
                (None, Some(path)) => PrecisionSource::Adjacency {
                    path,
                    strict: cfg.strict_adjacency,
                },
                (None, None) => bail!("precision needs --adjacency, --grid or a config naming one"),
            };
            println!("{}", cmd_precision(source, &cfg.output)?.display());
        }
        Command::Sample { common, seed } => {
            let cfg = load(&common, seed)?;
            print_report(&cmd_sample(&cfg)?);
        }
        Command::Decompose { common, trace } => {
            let cfg = load(&common, None)?;
            let trace = trace.unwrap_or_else(|| cfg.output.join(TRACE_FILE));
            println!("{}", cmd_decompose(&cfg, &trace)?.display());
        }
        Command::Run { common, seed } => {
            let cfg = load(&common, seed)?;
            for entry in cmd_run(&cfg)?.files {
                println!("{}  {}", entry.sha256, entry.path);
            }
        }
        Command::Diagnose { common, trace } => {
            let cfg = load(&common, None)?;
            let trace = trace.unwrap_or_else(|| cfg.output.join(TRACE_FILE));
            print_report(&cmd_diagnose(&cfg, &trace)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
