//! Seed-set selection methods.

mod centrality;
mod greedy;
mod imrank;
mod static_greedy;

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;

use crate::diffusion::DiffusionConfig;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::num::Real;
use crate::rng::Seed;

pub use centrality::{
    brandes_betweenness, pagerank, pagerank_step, CentralityScores, PageRankConfig,
};
pub use greedy::{greedy_im, greedy_maximize, GreedyStrategy, MonteCarloOracle, SpreadOracle};
pub use imrank::{imrank, imrank_ranking};
pub use static_greedy::static_greedy;

/// Selection method, in report-table order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Betweenness,
    PageRank,
    ImRank,
    StaticGreedy,
    Greedy,
    Random,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Betweenness,
        Method::PageRank,
        Method::ImRank,
        Method::StaticGreedy,
        Method::Greedy,
        Method::Random,
    ];

    /// The five methods compared in the result tables.
    pub const TABLE: [Method; 5] = [
        Method::Betweenness,
        Method::PageRank,
        Method::ImRank,
        Method::StaticGreedy,
        Method::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Betweenness => "betweenness",
            Method::PageRank => "pagerank",
            Method::ImRank => "imrank",
            Method::StaticGreedy => "static_greedy",
            Method::Greedy => "greedy",
            Method::Random => "random",
        }
    }

    /// Stable tag for deriving this method's random streams.
    pub fn stream_tag(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::param(format!("unknown method {s:?}")))
    }
}

/// Ordered seed nodes with provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedSet {
    pub nodes: Vec<NodeId>,
    pub method: Method,
    /// `key=value` description of the parameters used.
    pub params: String,
}

impl SeedSet {
    pub fn k(&self) -> usize {
        self.nodes.len()
    }

    /// Header comment followed by one original label per line.
    pub fn write<W: Write>(&self, graph: &Graph, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# method={} k={} {}",
            self.method,
            self.k(),
            self.params
        )?;
        for &u in &self.nodes {
            writeln!(out, "{}", graph.label(u))?;
        }
        Ok(())
    }
}

/// Reads seed labels (one per line, `#` comments) into dense indices of `graph`.
pub fn read_seed_labels<R: BufRead>(reader: R, graph: &Graph) -> Result<Vec<NodeId>> {
    let index = graph.label_index();
    let mut nodes = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let label: u64 = t.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("invalid label {t:?}"),
        })?;
        let u = *index.get(&label).ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("unknown label {label}"),
        })?;
        nodes.push(u);
    }
    Ok(nodes)
}

/// The `k` best-scoring nodes, descending by score, ties by lowest index.
pub fn select_top_k<T: Real>(scores: &CentralityScores<T>, k: usize) -> Result<Vec<NodeId>> {
    if k > scores.len() {
        return Err(Error::Capacity {
            requested: k,
            available: scores.len(),
        });
    }
    let mut r = scores.ranking();
    r.truncate(k);
    Ok(r)
}

/// `k` distinct nodes uniformly without replacement.
pub fn random_seeds<R: Rng + ?Sized>(g: &Graph, k: usize, rng: &mut R) -> Result<Vec<NodeId>> {
    if k > g.node_count() {
        return Err(Error::Capacity {
            requested: k,
            available: g.node_count(),
        });
    }
    Ok(sample(rng, g.node_count(), k).into_vec())
}

/// Parameters shared by all methods.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionParams {
    pub k: usize,
    pub diffusion: DiffusionConfig,
    /// Snapshot count for StaticGreedy.
    pub snapshots: usize,
    pub imrank_hops: usize,
    pub imrank_iters: usize,
    pub pagerank: PageRankConfig,
    pub greedy: GreedyStrategy,
}

impl Default for SelectionParams {
    fn default() -> Self {
        SelectionParams {
            k: 100,
            diffusion: DiffusionConfig::default(),
            snapshots: 200,
            imrank_hops: 1,
            imrank_iters: 10,
            pagerank: PageRankConfig::default(),
            greedy: GreedyStrategy::Exhaustive,
        }
    }
}

/// Runs `method` on `g`. Stochastic methods draw from `seed` only.
pub fn select_seeds(
    g: &Graph,
    method: Method,
    params: &SelectionParams,
    seed: Seed,
) -> Result<SeedSet> {
    let k = params.k;
    if k > g.node_count() {
        return Err(Error::Capacity {
            requested: k,
            available: g.node_count(),
        });
    }
    let p = params.diffusion.p;
    let (nodes, desc) = match method {
        Method::Betweenness => (
            select_top_k(&brandes_betweenness::<f64>(g), k)?,
            String::new(),
        ),
        Method::PageRank => {
            let c = &params.pagerank;
            (
                select_top_k(&pagerank::<f64>(g, c), k)?,
                format!(
                    "damping={} tol={} max_iters={}",
                    c.damping, c.tol, c.max_iters
                ),
            )
        }
        Method::ImRank => (
            imrank(g, k, p, params.imrank_hops, params.imrank_iters),
            format!(
                "p={p} L={} iters={}",
                params.imrank_hops, params.imrank_iters
            ),
        ),
        Method::StaticGreedy => (
            static_greedy(g, k, p, params.snapshots, seed)?,
            format!("p={p} R={}", params.snapshots),
        ),
        Method::Greedy => (
            greedy_im(g, k, &params.diffusion, seed, params.greedy)?,
            format!(
                "p={p} num_sims={} max_steps={}",
                params.diffusion.num_sims, params.diffusion.max_steps
            ),
        ),
        Method::Random => (random_seeds(g, k, &mut seed.rng())?, String::new()),
    };
    Ok(SeedSet {
        nodes,
        method,
        params: desc.trim().to_string(),
    })
}
