//! Subcommand implementations.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use log::info;
use lpim_core::diffusion::{estimate_spread, DiffusionConfig};
use lpim_core::ergm::{
    fit_mple, read_model, write_model, ErgmModel, McmcConfig, MpleConfig, Term, TermKind, TermSet,
};
use lpim_core::eval::{
    best_results, run_experiment_grid, write_report_csv, write_trends_csv, ReportRow, REPORT_HEADER,
};
use lpim_core::graph::{graph_stats, load_snap_edge_list_with_report, write_snap_edge_list};
use lpim_core::linkpred::{force_observed, medial_probabilities, trim, TrimMode};
use lpim_core::seeds::{
    read_seed_labels, select_seeds, GreedyStrategy, Method, PageRankConfig, SelectionParams,
};
use lpim_core::{graph, Graph, Seed};

use crate::config::{parse_sampling, ExperimentConfig};
use crate::exit::UsageError;

pub const VERSION: &str = concat!("lpim ", env!("CARGO_PKG_VERSION"));

/// Loads a SNAP edge list, logging dropped records.
pub fn load_graph(path: &Path) -> Result<Graph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let (g, report) = load_snap_edge_list_with_report(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))?;
    info!(
        "{}: {} nodes, {} edges ({} self-loops and {} duplicates dropped)",
        path.display(),
        g.node_count(),
        g.edge_count(),
        report.self_loops,
        report.duplicates
    );
    Ok(g)
}

/// Buffered writer for `path`, or stdout when absent.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn stats(path: &Path, histogram: bool, out: &mut dyn Write) -> Result<()> {
    let g = load_graph(path)?;
    let s = graph_stats::<f64>(&g);
    writeln!(out, "nodes: {}", s.nodes)?;
    writeln!(out, "edges: {}", s.edges)?;
    writeln!(out, "triangles: {}", s.triangles)?;
    writeln!(out, "isolates: {}", s.isolates)?;
    writeln!(out, "avg_clustering: {:.6}", s.avg_clustering)?;
    writeln!(out, "largest_wcc_nodes: {}", s.largest_wcc_nodes)?;
    writeln!(out, "largest_wcc_edges: {}", s.largest_wcc_edges)?;
    if histogram {
        for (d, c) in &s.degree_histogram {
            writeln!(out, "degree {d}: {c}")?;
        }
    }
    Ok(())
}

/// ERGM term and fitting options shared by `fit-ergm` and `predict`.
#[derive(Clone, Debug, clap::Args)]
pub struct ErgmArgs {
    /// Comma-separated terms from edges, isolates, gwdegree, gwesp, gwdsp.
    #[arg(long, default_value = "edges,isolates,gwdegree,gwesp,gwdsp")]
    pub terms: String,
    #[arg(long, default_value_t = 0.5)]
    pub decay_degree: f64,
    #[arg(long, default_value_t = 0.5)]
    pub decay_esp: f64,
    #[arg(long, default_value_t = 0.5)]
    pub decay_dsp: f64,
    /// Dyads used by the pseudo-likelihood: auto, all or case_control.
    #[arg(long, default_value = "auto")]
    pub sampling: String,
}

impl ErgmArgs {
    pub fn term_set(&self) -> Result<TermSet<f64>> {
        let terms = self
            .terms
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|name| {
                Ok(match TermKind::parse(name)? {
                    TermKind::Edges => Term::edges(),
                    TermKind::Isolates => Term::isolates(),
                    TermKind::GwDegree => Term::gw_degree(self.decay_degree),
                    TermKind::GwEsp => Term::gw_esp(self.decay_esp),
                    TermKind::GwDsp => Term::gw_dsp(self.decay_dsp),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TermSet::new(terms)?)
    }

    pub fn mple(&self) -> Result<MpleConfig> {
        Ok(MpleConfig {
            sampling: parse_sampling(&self.sampling)?,
            ..Default::default()
        })
    }
}

pub fn fit_ergm(path: &Path, args: &ErgmArgs, seed: u64, out: Option<&Path>) -> Result<()> {
    let g = load_graph(path)?;
    let model = fit_mple(&g, &args.term_set()?, &args.mple()?, Seed::new(seed))?;
    let mut w = sink(out)?;
    write_model(&model, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Sampler options; unset values follow the graph-size defaults.
#[derive(Clone, Debug, clap::Args)]
pub struct McmcArgs {
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thinning: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub chains: usize,
}

impl McmcArgs {
    pub fn config(&self, g: &Graph) -> Result<McmcConfig> {
        if self.chains == 0 {
            bail!(UsageError("chains must be positive".into()));
        }
        let auto = McmcConfig::for_graph(g);
        Ok(McmcConfig {
            burn_in: self.burn_in.unwrap_or(auto.burn_in),
            thinning: self.thinning.unwrap_or(auto.thinning),
            chains: self.chains,
        })
    }
}

#[derive(Clone, Debug)]
pub struct PredictOptions {
    pub model: Option<PathBuf>,
    pub medial: usize,
    pub trim: TrimMode<f64>,
    pub map_out: PathBuf,
    pub graph_out: PathBuf,
    pub seed: u64,
}

/// Writes the probability map and the completed graph.
pub fn predict(path: &Path, ergm: &ErgmArgs, mcmc: &McmcArgs, opts: &PredictOptions) -> Result<()> {
    let g = load_graph(path)?;
    let mcmc = mcmc.config(&g)?;
    if opts.medial == 0 {
        bail!(UsageError("--medial must be positive".into()));
    }
    let seed = Seed::new(opts.seed);
    let model: ErgmModel<f64> = match &opts.model {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            read_model(BufReader::new(f)).with_context(|| format!("reading {}", p.display()))?
        }
        None => fit_mple(&g, &ergm.term_set()?, &ergm.mple()?, seed.child(0))?,
    };
    let map = medial_probabilities(&model, &g, opts.medial, &mcmc, seed.child(1))?;
    let map = force_observed(map, &g)?;
    let kept = trim(&map, opts.trim, &g)?;
    let completed = graph::add_edges(&g, &kept.kept)?;
    let mut w = sink(Some(&opts.map_out))?;
    map.write(&g, &mut w)?;
    w.flush()?;
    let mut w = sink(Some(&opts.graph_out))?;
    write_snap_edge_list(&completed, &mut w)?;
    w.flush()?;
    info!("kept {} predicted edges", kept.kept.len());
    Ok(())
}

/// Diffusion options shared by `select-seeds` and `simulate`.
#[derive(Clone, Debug, clap::Args)]
pub struct DiffusionArgs {
    /// Edge activation probability.
    #[arg(long, short = 'p', default_value_t = 0.25)]
    pub p: f64,
    #[arg(long, default_value_t = 100)]
    pub num_sims: usize,
    #[arg(long, default_value_t = 100)]
    pub max_steps: usize,
}

impl DiffusionArgs {
    pub fn config(&self) -> Result<DiffusionConfig> {
        Ok(DiffusionConfig::new(self.p, self.num_sims, self.max_steps)?)
    }
}

#[derive(Clone, Debug, clap::Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub method: Method,
    #[arg(long, short = 'k', default_value_t = 100)]
    pub k: usize,
    #[command(flatten)]
    pub diffusion: DiffusionArgs,
    /// StaticGreedy snapshot count.
    #[arg(long, default_value_t = 200)]
    pub snapshots: usize,
    #[arg(long, default_value_t = 1)]
    pub imrank_hops: usize,
    #[arg(long, default_value_t = 10)]
    pub imrank_iters: usize,
    #[arg(long, default_value_t = 0.85)]
    pub pagerank_damping: f64,
    /// Greedy evaluation: exhaustive or lazy.
    #[arg(long, default_value = "exhaustive", value_parser = crate::config::parse_greedy)]
    pub greedy: GreedyStrategy,
}

pub fn select(path: &Path, args: &SelectArgs, seed: u64, out: Option<&Path>) -> Result<()> {
    let g = load_graph(path)?;
    let params = SelectionParams {
        k: args.k,
        diffusion: args.diffusion.config()?,
        snapshots: args.snapshots,
        imrank_hops: args.imrank_hops,
        imrank_iters: args.imrank_iters,
        pagerank: PageRankConfig {
            damping: args.pagerank_damping,
            ..Default::default()
        },
        greedy: args.greedy,
    };
    let set = select_seeds(&g, args.method, &params, Seed::new(seed))?;
    let mut w = sink(out)?;
    set.write(&g, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn simulate(
    path: &Path,
    seeds_path: &Path,
    diffusion: &DiffusionArgs,
    seed: u64,
    runs_out: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let g = load_graph(path)?;
    let f = File::open(seeds_path).with_context(|| format!("opening {}", seeds_path.display()))?;
    let seeds = read_seed_labels(BufReader::new(f), &g)?;
    let est = estimate_spread(&g, &seeds, &diffusion.config()?, Seed::new(seed))?;
    writeln!(out, "seeds: {}", seeds.len())?;
    writeln!(out, "runs: {}", est.runs.len())?;
    writeln!(out, "mean_spread: {}", est.mean)?;
    if let Some(p) = runs_out {
        let mut w = sink(Some(p))?;
        for run in &est.runs {
            let labels: Vec<String> = run
                .infected()
                .iter()
                .map(|&u| g.label(u).to_string())
                .collect();
            writeln!(w, "{}", labels.join(" "))?;
        }
        w.flush()?;
    }
    Ok(())
}

/// Files written by `evaluate`, relative to the output directory.
pub const REPORT_FILE: &str = "report.csv";
pub const BEST_FILE: &str = "best.csv";
pub const TRENDS_FILE: &str = "trends.csv";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const CONFIG_FILE: &str = "effective.cfg";

/// Runs the full grid and writes the report, best rows, trends, effective
/// configuration and run manifest.
pub fn evaluate(cfg: &ExperimentConfig, workers: usize) -> Result<()> {
    let dataset = cfg
        .dataset
        .as_ref()
        .ok_or_else(|| UsageError("no dataset given (set `dataset` or pass --dataset)".into()))?;
    let t0 = Instant::now();
    let g = load_graph(dataset)?;
    let load_s = t0.elapsed().as_secs_f64();
    let grid = cfg.grid(&g)?;

    let t1 = Instant::now();
    let report = run_experiment_grid(&cfg.dataset_label(), &g, &grid, Seed::new(cfg.master_seed))?;
    let grid_s = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let full = cfg.full_precision;
    let mut w = sink(Some(&dir.join(REPORT_FILE)))?;
    write_report_csv(&report.rows, &mut w, full)?;
    w.flush()?;
    let mut w = sink(Some(&dir.join(BEST_FILE)))?;
    write_report_csv(&best_results(&report.rows), &mut w, full)?;
    w.flush()?;
    let mut w = sink(Some(&dir.join(TRENDS_FILE)))?;
    write_trends_csv(&cfg.dataset_label(), &report.trends, &mut w, full)?;
    w.flush()?;
    std::fs::write(dir.join(CONFIG_FILE), cfg.dump())?;
    let write_s = t2.elapsed().as_secs_f64();

    let mut m = String::new();
    m.push_str("# lpim run manifest\n");
    m.push_str(&format!("tool_version = {VERSION}\n"));
    m.push_str(&format!("master_seed = {}\n", cfg.master_seed));
    m.push_str(&format!("workers = {workers}\n"));
    m.push_str(&format!(
        "graph.nodes = {}\ngraph.edges = {}\n",
        g.node_count(),
        g.edge_count()
    ));
    for line in cfg.dump().lines() {
        m.push_str(&format!("config.{line}\n"));
    }
    for (j, t) in report.trials.iter().enumerate() {
        let theta: Vec<String> = t.model.theta.iter().map(|x| x.to_string()).collect();
        m.push_str(&format!("trial.{j}.similarity = {}\n", t.similarity));
        m.push_str(&format!("trial.{j}.removed = {}\n", t.removed.len()));
        m.push_str(&format!("trial.{j}.theta = {}\n", theta.join(",")));
        m.push_str(&format!(
            "trial.{j}.prediction_shortfall = {}\n",
            t.shortfall
        ));
    }
    m.push_str(&format!("timing.load_seconds = {load_s:.3}\n"));
    m.push_str(&format!("timing.grid_seconds = {grid_s:.3}\n"));
    m.push_str(&format!("timing.write_seconds = {write_s:.3}\n"));
    std::fs::write(dir.join(MANIFEST_FILE), m)?;
    info!("wrote {} rows to {}", report.rows.len(), dir.display());
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| {
        lpim_core::Error::Parse {
            line: line as usize,
            message: format!("bad {} value {raw:?}", REPORT_HEADER[i]),
        }
        .into()
    })
}

fn opt_field(rec: &csv::StringRecord, i: usize, line: u64) -> Result<Option<f64>> {
    match rec.get(i) {
        Some("") | None => Ok(None),
        Some(_) => field(rec, i, line).map(Some),
    }
}

/// Reads a report CSV written by `evaluate`.
pub fn read_report(path: &Path) -> Result<Vec<ReportRow<f64>>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut r = csv::Reader::from_reader(BufReader::new(file));
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != REPORT_HEADER {
        return Err(lpim_core::Error::Parse {
            line: 1,
            message: format!("unexpected header {header:?}"),
        }
        .into());
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let method =
            rec.get(1)
                .unwrap_or("")
                .parse::<Method>()
                .map_err(|e| lpim_core::Error::Parse {
                    line: line as usize,
                    message: e.to_string(),
                })?;
        rows.push(ReportRow {
            dataset: rec.get(0).unwrap_or("").to_string(),
            method,
            diff_p: field(&rec, 2, line)?,
            similarity: field(&rec, 3, line)?,
            added: field(&rec, 4, line)?,
            random: field(&rec, 5, line)?,
            total: field(&rec, 6, line)?,
            m1: opt_field(&rec, 7, line)?,
            m2: opt_field(&rec, 8, line)?,
            m3: field(&rec, 9, line)?,
        });
    }
    Ok(rows)
}

/// Best row per method from an existing report.
pub fn report(path: &Path, full_precision: bool, out: Option<&Path>) -> Result<()> {
    let rows = read_report(path)?;
    let mut w = sink(out)?;
    write_report_csv(&best_results(&rows), &mut w, full_precision)?;
    w.flush()?;
    Ok(())
}
