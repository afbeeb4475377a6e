//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use lpim_core::linkpred::TrimMode;

use crate::commands::{self, DiffusionArgs, ErgmArgs, McmcArgs, PredictOptions, SelectArgs};
use crate::config::ExperimentConfig;
use crate::exit;

#[derive(Debug, Parser)]
#[command(
    name = "lpim",
    version,
    about = "Link-predicted influence maximization"
)]
pub struct Cli {
    /// Worker threads for all parallel stages (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Master random seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print graph statistics for a SNAP edge list.
    Stats {
        graph: PathBuf,
        /// Also print the degree histogram.
        #[arg(long)]
        histogram: bool,
    },
    /// Fit an ERGM by maximum pseudo-likelihood and write the model.
    FitErgm {
        graph: PathBuf,
        #[command(flatten)]
        ergm: ErgmArgs,
        #[command(flatten)]
        seed: SeedArg,
        /// Model file (stdout if omitted).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Predict missing edges and write the probability map and completed graph.
    Predict {
        graph: PathBuf,
        /// Previously fitted model; fitted from the graph if omitted.
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        ergm: ErgmArgs,
        #[command(flatten)]
        mcmc: McmcArgs,
        /// Number of sampled graphs averaged into the map.
        #[arg(long, default_value_t = 1000)]
        medial: usize,
        /// Keep the m most probable new dyads.
        #[arg(long, conflicts_with = "threshold")]
        top_m: Option<usize>,
        /// Keep new dyads with probability at least this value.
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long)]
        map_out: PathBuf,
        #[arg(long)]
        graph_out: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Select a seed set.
    SelectSeeds {
        graph: PathBuf,
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        seed: SeedArg,
        /// Seed file (stdout if omitted).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Estimate the spread of a seed set by independent-cascade simulation.
    Simulate {
        graph: PathBuf,
        /// Seed file with one node label per line.
        #[arg(long)]
        seeds: PathBuf,
        #[command(flatten)]
        diffusion: DiffusionArgs,
        #[command(flatten)]
        seed: SeedArg,
        /// Write the infected labels of every run, one run per line.
        #[arg(long)]
        runs_out: Option<PathBuf>,
    },
    /// Run the full evaluation grid.
    Evaluate {
        /// Configuration file of `key = value` lines.
        #[arg(long, short)]
        config: Option<PathBuf>,
        /// Override a configuration key (repeatable, applied in order).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Print the effective configuration and exit.
        #[arg(long)]
        dump_config: bool,
    },
    /// Recompute the best row per method from a report CSV.
    Report {
        report: PathBuf,
        #[arg(long)]
        full_precision: bool,
        /// Output file (stdout if omitted).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

/// Effective configuration for `evaluate`: defaults, then the file, then
/// `--set` overrides in order, then the dedicated flags.
pub fn evaluate_config(
    config: Option<&PathBuf>,
    overrides: &[String],
    dataset: Option<&PathBuf>,
    output_dir: Option<&PathBuf>,
    seed: Option<u64>,
) -> Result<ExperimentConfig> {
    let mut cfg = match config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    for o in overrides {
        cfg.apply_override(o)?;
    }
    if let Some(d) = dataset {
        cfg.dataset = Some(d.clone());
    }
    if let Some(d) = output_dir {
        cfg.output_dir = d.clone();
    }
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> Result<()> {
    let stdout = std::io::stdout();
    match &cli.command {
        Command::Stats { graph, histogram } => {
            let mut out = stdout.lock();
            commands::stats(graph, *histogram, &mut out)?;
            out.flush()?;
        }
        Command::FitErgm {
            graph,
            ergm,
            seed,
            out,
        } => commands::fit_ergm(graph, ergm, seed.seed, out.as_deref())?,
        Command::Predict {
            graph,
            model,
            ergm,
            mcmc,
            medial,
            top_m,
            threshold,
            map_out,
            graph_out,
            seed,
        } => {
            let trim = match top_m {
                Some(m) => TrimMode::TopM(*m),
                None => TrimMode::Threshold(*threshold),
            };
            let opts = PredictOptions {
                model: model.clone(),
                medial: *medial,
                trim,
                map_out: map_out.clone(),
                graph_out: graph_out.clone(),
                seed: seed.seed,
            };
            commands::predict(graph, ergm, mcmc, &opts)?;
        }
        Command::SelectSeeds {
            graph,
            select,
            seed,
            out,
        } => commands::select(graph, select, seed.seed, out.as_deref())?,
        Command::Simulate {
            graph,
            seeds,
            diffusion,
            seed,
            runs_out,
        } => {
            let mut out = stdout.lock();
            commands::simulate(
                graph,
                seeds,
                diffusion,
                seed.seed,
                runs_out.as_deref(),
                &mut out,
            )?;
            out.flush()?;
        }
        Command::Evaluate {
            config,
            overrides,
            dataset,
            output_dir,
            seed,
            dump_config,
        } => {
            let cfg = evaluate_config(
                config.as_ref(),
                overrides,
                dataset.as_ref(),
                output_dir.as_ref(),
                *seed,
            )?;
            if *dump_config {
                print!("{}", cfg.dump());
            } else {
                commands::evaluate(&cfg, cli.workers)?;
            }
        }
        Command::Report {
            report,
            full_precision,
            out,
        } => commands::report(report, *full_precision, out.as_deref())?,
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .try_init();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return exit::INVARIANT;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit::code_for(&e)
        }
    }
}
