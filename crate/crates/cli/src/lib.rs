//! Experiment pipeline: generate or load graphs, train seeded embedding runs,
//! compare them, run the downstream classification study and collect
//! everything into plot-ready tables.
//!
//! Each stage reads and writes files under the configured output directory:
//!
//! ```text
//! out/graphs/<graph>.{edges,json,labels}
//! out/embeddings/<graph>/<algorithm>_<seed>.emb
//! out/compare/<graph>/<algorithm>/{nodes.csv,summary.json}
//! out/downstream/<graph>/<algorithm>/{f1.csv,stable_core.json}
//! out/report.csv, out/report_nodes.csv
//! out/manifests/<stage>.json
//! ```

pub mod config;
mod error;
pub mod graphs;
pub mod layout;
pub mod manifest;
pub mod stages;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{ExperimentConfig, Overrides};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "nestab", version, about = "Stability of node embeddings across random seeds")]
pub struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed; run i uses seed + i.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the configured graphs (one per sweep point).
    Generate,
    /// Train the configured number of embedding runs per graph.
    Embed,
    /// Compare all pairs of runs with the configured measures.
    Compare {
        /// Compare the `.emb` files in this directory instead of native runs.
        #[arg(long)]
        external_dir: Option<PathBuf>,
    },
    /// Classification study: F1 spread and stable cores.
    Downstream,
    /// Consolidate stage outputs into report.csv and report_nodes.csv.
    Report,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs --config <path>".into()))?;
    let overrides = Overrides {
        seed: cli.seed,
        workers: cli.workers,
        out: cli.out.clone(),
    };
    ExperimentConfig::load(path, &overrides)
}

/// Runs one subcommand inside a pool of the configured size.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Command::Report = cli.command {
        let out = match (&cli.out, &cli.config) {
            (Some(out), _) => out.clone(),
            (None, Some(_)) => load_config(cli)?.out,
            (None, None) => return Err(CliError::Config("report needs --out <dir> or --config <path>".into())),
        };
        return stages::run_report(&out);
    }
    let mut cfg = load_config(cli)?;
    if let Command::Compare { external_dir: Some(dir) } = &cli.command {
        cfg.compare.external_dir = Some(dir.clone());
        cfg.validate()?;
    }
    let workers = cfg.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Other(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Generate => stages::run_generate(&cfg, workers),
        Command::Embed => stages::run_embed(&cfg, workers),
        Command::Compare { .. } => stages::run_compare(&cfg, workers),
        Command::Downstream => stages::run_downstream(&cfg, workers),
        Command::Report => unreachable!(),
    })
}
