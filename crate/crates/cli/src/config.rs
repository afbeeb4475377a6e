//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are
//! ignored. Lists are comma separated. Later assignments win, and command
//! line overrides are applied after the file. A relative `dataset` path in a
//! file resolves against the file's directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use lpim_core::diffusion::DiffusionConfig;
use lpim_core::ergm::{DyadSampling, McmcConfig, MpleConfig, TermSet};
use lpim_core::eval::GridConfig;
use lpim_core::linkpred::LinkPredConfig;
use lpim_core::seeds::{GreedyStrategy, Method, PageRankConfig, SelectionParams};
use lpim_core::Graph;

use crate::exit::UsageError;

/// Every recognised key, in dump order.
pub const KEYS: &[&str] = &[
    "dataset",
    "dataset_name",
    "output_dir",
    "master_seed",
    "methods",
    "k",
    "diff_ps",
    "similarities",
    "num_sims",
    "max_steps",
    "snapshots",
    "imrank_hops",
    "imrank_iters",
    "pagerank_damping",
    "greedy",
    "num_medial_graphs",
    "decay_degree",
    "decay_esp",
    "decay_dsp",
    "mple_sampling",
    "burn_in",
    "thinning",
    "chains",
    "m3_scale",
    "full_precision",
];

/// `auto` or a fixed count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Auto {
    Auto,
    Fixed(usize),
}

impl Auto {
    fn or(self, default: usize) -> usize {
        match self {
            Auto::Auto => default,
            Auto::Fixed(v) => v,
        }
    }
}

impl FromStr for Auto {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            Ok(Auto::Auto)
        } else {
            Ok(Auto::Fixed(s.parse()?))
        }
    }
}

impl std::fmt::Display for Auto {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Auto::Auto => f.write_str("auto"),
            Auto::Fixed(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: Option<PathBuf>,
    /// Defaults to the dataset file stem.
    pub dataset_name: Option<String>,
    pub output_dir: PathBuf,
    pub master_seed: u64,
    pub methods: Vec<Method>,
    pub k: usize,
    pub diff_ps: Vec<f64>,
    pub similarities: Vec<f64>,
    pub num_sims: usize,
    pub max_steps: usize,
    pub snapshots: usize,
    pub imrank_hops: usize,
    pub imrank_iters: usize,
    pub pagerank_damping: f64,
    pub greedy: GreedyStrategy,
    pub num_medial_graphs: usize,
    pub decay_degree: f64,
    pub decay_esp: f64,
    pub decay_dsp: f64,
    pub mple_sampling: String,
    pub burn_in: Auto,
    pub thinning: Auto,
    pub chains: usize,
    pub m3_scale: f64,
    pub full_precision: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: None,
            dataset_name: None,
            output_dir: PathBuf::from("lpim-out"),
            master_seed: 1,
            methods: Method::TABLE.to_vec(),
            k: 100,
            diff_ps: vec![0.25, 0.2, 0.15],
            similarities: vec![0.9, 0.85, 0.8, 0.75, 0.7],
            num_sims: 100,
            max_steps: 100,
            snapshots: 200,
            imrank_hops: 1,
            imrank_iters: 10,
            pagerank_damping: 0.85,
            greedy: GreedyStrategy::Exhaustive,
            num_medial_graphs: 1000,
            decay_degree: 0.5,
            decay_esp: 0.5,
            decay_dsp: 0.5,
            mple_sampling: "auto".into(),
            burn_in: Auto::Auto,
            thinning: Auto::Auto,
            chains: 4,
            m3_scale: 1.0,
            full_precision: false,
        }
    }
}

fn list<T: FromStr>(v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| anyhow!("{s:?}: {e}")))
        .collect()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn parse_sampling(s: &str) -> Result<DyadSampling> {
    match s {
        "auto" => Ok(DyadSampling::default()),
        "all" => Ok(DyadSampling::All),
        "case_control" => Ok(DyadSampling::CaseControl { ratio: 5 }),
        other => bail!("unknown sampling {other:?} (expected auto, all or case_control)"),
    }
}

pub fn parse_greedy(s: &str) -> Result<GreedyStrategy> {
    match s {
        "exhaustive" => Ok(GreedyStrategy::Exhaustive),
        "lazy" => Ok(GreedyStrategy::Lazy),
        other => bail!("unknown greedy strategy {other:?} (expected exhaustive or lazy)"),
    }
}

fn greedy_name(g: GreedyStrategy) -> &'static str {
    match g {
        GreedyStrategy::Exhaustive => "exhaustive",
        GreedyStrategy::Lazy => "lazy",
    }
}

impl ExperimentConfig {
    /// Assigns one key. Unknown keys are errors naming the key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let num = |what: &str| anyhow!("invalid value {v:?} for {what}");
        match key {
            "dataset" => self.dataset = Some(PathBuf::from(v)),
            "dataset_name" => self.dataset_name = Some(v.to_string()),
            "output_dir" => self.output_dir = PathBuf::from(v),
            "master_seed" => self.master_seed = v.parse().map_err(|_| num(key))?,
            "methods" => self.methods = list(v)?,
            "k" => self.k = v.parse().map_err(|_| num(key))?,
            "diff_ps" => self.diff_ps = list(v)?,
            "similarities" => self.similarities = list(v)?,
            "num_sims" => self.num_sims = v.parse().map_err(|_| num(key))?,
            "max_steps" => self.max_steps = v.parse().map_err(|_| num(key))?,
            "snapshots" => self.snapshots = v.parse().map_err(|_| num(key))?,
            "imrank_hops" => self.imrank_hops = v.parse().map_err(|_| num(key))?,
            "imrank_iters" => self.imrank_iters = v.parse().map_err(|_| num(key))?,
            "pagerank_damping" => self.pagerank_damping = v.parse().map_err(|_| num(key))?,
            "greedy" => self.greedy = parse_greedy(v)?,
            "num_medial_graphs" => self.num_medial_graphs = v.parse().map_err(|_| num(key))?,
            "decay_degree" => self.decay_degree = v.parse().map_err(|_| num(key))?,
            "decay_esp" => self.decay_esp = v.parse().map_err(|_| num(key))?,
            "decay_dsp" => self.decay_dsp = v.parse().map_err(|_| num(key))?,
            "mple_sampling" => {
                parse_sampling(v)?;
                self.mple_sampling = v.to_string();
            }
            "burn_in" => self.burn_in = v.parse().map_err(|_| num(key))?,
            "thinning" => self.thinning = v.parse().map_err(|_| num(key))?,
            "chains" => self.chains = v.parse().map_err(|_| num(key))?,
            "m3_scale" => self.m3_scale = v.parse().map_err(|_| num(key))?,
            "full_precision" => self.full_precision = v.parse().map_err(|_| num(key))?,
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    /// Applies `key=value` text; `origin` names the source in errors and
    /// `base` resolves a relative dataset path.
    pub fn apply_text(&mut self, text: &str, origin: &str, base: Option<&Path>) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{origin}:{}: expected key = value", i + 1))?;
            let key = key.trim();
            self.set(key, value)
                .with_context(|| format!("{origin}:{}", i + 1))?;
            if key == "dataset" {
                if let (Some(base), Some(p)) = (base, self.dataset.as_ref()) {
                    if p.is_relative() {
                        self.dataset = Some(base.join(p));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| UsageError(format!("reading config {}", path.display())))?;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(&text, &path.display().to_string(), path.parent())?;
        Ok(cfg)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| anyhow!("override {assignment:?} is not key=value"))?;
        self.set(k.trim(), v)
    }

    pub fn dataset_label(&self) -> String {
        self.dataset_name.clone().unwrap_or_else(|| {
            self.dataset
                .as_ref()
                .and_then(|p| p.file_stem())
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into())
        })
    }

    /// Every key with its effective value; parses back to `self`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let value = match *key {
                "dataset" => self.dataset.as_ref().map(|p| p.display().to_string()),
                "dataset_name" => self.dataset_name.clone(),
                "output_dir" => Some(self.output_dir.display().to_string()),
                "master_seed" => Some(self.master_seed.to_string()),
                "methods" => Some(join(&self.methods)),
                "k" => Some(self.k.to_string()),
                "diff_ps" => Some(join(&self.diff_ps)),
                "similarities" => Some(join(&self.similarities)),
                "num_sims" => Some(self.num_sims.to_string()),
                "max_steps" => Some(self.max_steps.to_string()),
                "snapshots" => Some(self.snapshots.to_string()),
                "imrank_hops" => Some(self.imrank_hops.to_string()),
                "imrank_iters" => Some(self.imrank_iters.to_string()),
                "pagerank_damping" => Some(self.pagerank_damping.to_string()),
                "greedy" => Some(greedy_name(self.greedy).to_string()),
                "num_medial_graphs" => Some(self.num_medial_graphs.to_string()),
                "decay_degree" => Some(self.decay_degree.to_string()),
                "decay_esp" => Some(self.decay_esp.to_string()),
                "decay_dsp" => Some(self.decay_dsp.to_string()),
                "mple_sampling" => Some(self.mple_sampling.clone()),
                "burn_in" => Some(self.burn_in.to_string()),
                "thinning" => Some(self.thinning.to_string()),
                "chains" => Some(self.chains.to_string()),
                "m3_scale" => Some(self.m3_scale.to_string()),
                "full_precision" => Some(self.full_precision.to_string()),
                _ => unreachable!("key list and dump out of sync"),
            };
            if let Some(v) = value {
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        out
    }

    pub fn terms(&self) -> Result<TermSet<f64>> {
        Ok(TermSet::standard(
            self.decay_degree,
            self.decay_esp,
            self.decay_dsp,
        )?)
    }

    pub fn mcmc(&self, g: &Graph) -> McmcConfig {
        let auto = McmcConfig::for_graph(g);
        McmcConfig {
            burn_in: self.burn_in.or(auto.burn_in),
            thinning: self.thinning.or(auto.thinning),
            chains: self.chains,
        }
    }

    pub fn selection(&self) -> Result<SelectionParams> {
        Ok(SelectionParams {
            k: self.k,
            diffusion: DiffusionConfig::new(
                self.diff_ps.first().copied().unwrap_or(0.0),
                self.num_sims,
                self.max_steps,
            )?,
            snapshots: self.snapshots,
            imrank_hops: self.imrank_hops,
            imrank_iters: self.imrank_iters,
            pagerank: PageRankConfig {
                damping: self.pagerank_damping,
                ..Default::default()
            },
            greedy: self.greedy,
        })
    }

    /// Grid configuration for `g`; performs every check that does not need
    /// computation.
    pub fn grid(&self, g: &Graph) -> Result<GridConfig<f64>> {
        let grid = GridConfig {
            methods: self.methods.clone(),
            diff_ps: self.diff_ps.clone(),
            similarities: self.similarities.clone(),
            selection: self.selection()?,
            terms: self.terms()?,
            linkpred: LinkPredConfig {
                num_medial_graphs: self.num_medial_graphs,
                mple: MpleConfig {
                    sampling: parse_sampling(&self.mple_sampling)?,
                    ..Default::default()
                },
                mcmc: Some(self.mcmc(g)),
                ..Default::default()
            },
            m3_scale: self.m3_scale,
        };
        if self.chains == 0 {
            bail!("chains must be positive");
        }
        grid.validate(g.node_count())?;
        Ok(grid)
    }
}
