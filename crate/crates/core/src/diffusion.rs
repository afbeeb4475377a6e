//! Independent-cascade diffusion and Monte Carlo spread estimation.
//!
//! A cascade proceeds in synchronous rounds: every node activated in round
//! `t` gets a single chance to activate each still-inactive neighbor, which
//! succeeds with probability `p`. Because a target is skipped once it is
//! active, each undirected edge is flipped at most once per cascade, so a
//! cascade is equivalent to reachability from the seeds in a live-edge
//! snapshot that keeps each edge independently with probability `p`.
//!
//! Coin flips come from an [`EdgeCoins`] source. [`RngCoins`] draws lazily
//! from a generator; [`HashedCoins`] makes each edge's coin a pure function of
//! `(stream seed, dyad)`. The Monte Carlo estimators use hashed coins keyed
//! by run index, so run `r` on two graphs that share an edge sees the same
//! outcome for that edge.

use std::io::Write;

use rand::{Rng, RngCore};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Dyad, Graph, NodeId};
use crate::rng::{splitmix64, Seed, Threshold};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffusionConfig {
    /// Uniform activation probability per edge.
    pub p: f64,
    pub num_sims: usize,
    pub max_steps: usize,
}

impl DiffusionConfig {
    pub fn new(p: f64, num_sims: usize, max_steps: usize) -> Result<Self> {
        let cfg = DiffusionConfig {
            p,
            num_sims,
            max_steps,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::param(format!(
                "diffusion probability {} outside [0, 1]",
                self.p
            )));
        }
        if self.num_sims == 0 || self.max_steps == 0 {
            return Err(Error::param("num_sims and max_steps must be at least 1"));
        }
        Ok(())
    }
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        DiffusionConfig {
            p: 0.25,
            num_sims: 100,
            max_steps: 100,
        }
    }
}

/// Source of per-edge activation outcomes.
pub trait EdgeCoins {
    fn flip(&mut self, from: NodeId, to: NodeId) -> bool;
}

/// Draws one `u64` per activation attempt.
pub struct RngCoins<'a, R: ?Sized> {
    rng: &'a mut R,
    threshold: Threshold,
}

impl<'a, R: RngCore + ?Sized> RngCoins<'a, R> {
    pub fn new(rng: &'a mut R, p: f64) -> Self {
        RngCoins {
            rng,
            threshold: Threshold::from_probability(p),
        }
    }
}

impl<R: RngCore + ?Sized> EdgeCoins for RngCoins<'_, R> {
    fn flip(&mut self, _from: NodeId, _to: NodeId) -> bool {
        self.threshold.accepts(self.rng.next_u64())
    }
}

/// Edge outcome as a hash of the stream seed and the undirected dyad.
#[derive(Clone, Copy, Debug)]
pub struct HashedCoins {
    key: u64,
    threshold: Threshold,
}

impl HashedCoins {
    pub fn new(seed: Seed, p: f64) -> Self {
        HashedCoins {
            key: seed.value(),
            threshold: Threshold::from_probability(p),
        }
    }

    #[inline]
    pub fn is_live(&self, d: Dyad) -> bool {
        self.threshold
            .accepts(splitmix64(self.key ^ splitmix64(d.key())))
    }
}

impl EdgeCoins for HashedCoins {
    #[inline]
    fn flip(&mut self, from: NodeId, to: NodeId) -> bool {
        self.is_live(Dyad::of(from, to))
    }
}

/// Outcome of one cascade.
///
/// `infected` lists nodes in activation order; `round_ends[t]` is the number
/// of nodes active after round `t` (round 0 is the seed set).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeResult {
    infected: Vec<NodeId>,
    round_ends: Vec<usize>,
}

impl CascadeResult {
    pub fn infected(&self) -> &[NodeId] {
        &self.infected
    }

    pub fn len(&self) -> usize {
        self.infected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.infected.is_empty()
    }

    pub fn steps_taken(&self) -> usize {
        self.round_ends.len() - 1
    }

    /// Nodes active after `step` rounds; saturates at the final set.
    pub fn infected_by_step(&self, step: usize) -> &[NodeId] {
        let end = self
            .round_ends
            .get(step)
            .copied()
            .unwrap_or(self.infected.len());
        &self.infected[..end]
    }
}

/// Reusable marking buffer so repeated cascades avoid O(n) clears.
pub(crate) struct Marks {
    stamp: Vec<u32>,
    epoch: u32,
}

impl Marks {
    pub(crate) fn new(n: usize) -> Self {
        Marks {
            stamp: vec![0; n],
            epoch: 0,
        }
    }

    pub(crate) fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    #[inline]
    pub(crate) fn insert(&mut self, u: NodeId) -> bool {
        if self.stamp[u] == self.epoch {
            false
        } else {
            self.stamp[u] = self.epoch;
            true
        }
    }

    #[inline]
    pub(crate) fn contains(&self, u: NodeId) -> bool {
        self.stamp[u] == self.epoch
    }
}

fn check_seeds(g: &Graph, seeds: &[NodeId]) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::param("seed set must be non-empty"));
    }
    seeds.iter().try_for_each(|&s| g.check_node(s))
}

pub(crate) fn cascade<C: EdgeCoins>(
    g: &Graph,
    seeds: &[NodeId],
    max_steps: usize,
    coins: &mut C,
    marks: &mut Marks,
) -> CascadeResult {
    marks.next_epoch();
    let mut infected = Vec::with_capacity(seeds.len() * 4);
    for &s in seeds {
        if marks.insert(s) {
            infected.push(s);
        }
    }
    let mut round_ends = vec![infected.len()];
    let mut frontier_start = 0;
    while round_ends.len() <= max_steps {
        let frontier_end = infected.len();
        for i in frontier_start..frontier_end {
            let u = infected[i];
            for &v in g.neighbors(u) {
                if !marks.contains(v) && coins.flip(u, v) {
                    marks.insert(v);
                    infected.push(v);
                }
            }
        }
        if infected.len() == frontier_end {
            break;
        }
        round_ends.push(infected.len());
        frontier_start = frontier_end;
    }
    CascadeResult {
        infected,
        round_ends,
    }
}

/// One cascade with an explicit coin source.
pub fn simulate_ic_with<C: EdgeCoins>(
    g: &Graph,
    seeds: &[NodeId],
    max_steps: usize,
    coins: &mut C,
) -> Result<CascadeResult> {
    check_seeds(g, seeds)?;
    Ok(cascade(
        g,
        seeds,
        max_steps,
        coins,
        &mut Marks::new(g.node_count()),
    ))
}

pub fn simulate_ic<R: RngCore + ?Sized>(
    g: &Graph,
    seeds: &[NodeId],
    p: f64,
    max_steps: usize,
    rng: &mut R,
) -> Result<CascadeResult> {
    simulate_ic_with(g, seeds, max_steps, &mut RngCoins::new(rng, p))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpreadEstimate {
    pub mean: f64,
    pub runs: Vec<CascadeResult>,
}

impl SpreadEstimate {
    /// Writes one line of space-separated node indices per run.
    pub fn write_runs<W: Write>(&self, mut out: W) -> Result<()> {
        for run in &self.runs {
            let line: Vec<String> = run.infected().iter().map(|u| u.to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Coins for run `run` of the estimator rooted at `seed`.
pub fn run_coins(seed: Seed, run: usize, p: f64) -> HashedCoins {
    HashedCoins::new(seed.child(run as u64), p)
}

/// `num_sims` cascades; run `r` uses [`run_coins`]`(seed, r, p)`.
pub fn estimate_spread(
    g: &Graph,
    seeds: &[NodeId],
    cfg: &DiffusionConfig,
    seed: Seed,
) -> Result<SpreadEstimate> {
    cfg.validate()?;
    check_seeds(g, seeds)?;
    let runs: Vec<CascadeResult> = (0..cfg.num_sims)
        .into_par_iter()
        .map_init(
            || Marks::new(g.node_count()),
            |marks, r| {
                cascade(
                    g,
                    seeds,
                    cfg.max_steps,
                    &mut run_coins(seed, r, cfg.p),
                    marks,
                )
            },
        )
        .collect();
    let total: usize = runs.iter().map(CascadeResult::len).sum();
    Ok(SpreadEstimate {
        mean: total as f64 / cfg.num_sims as f64,
        runs,
    })
}

/// Mean spread only, without retaining the per-run sets.
pub fn spread_mean(g: &Graph, seeds: &[NodeId], cfg: &DiffusionConfig, seed: Seed) -> Result<f64> {
    cfg.validate()?;
    check_seeds(g, seeds)?;
    let total: usize = (0..cfg.num_sims)
        .into_par_iter()
        .map_init(
            || Marks::new(g.node_count()),
            |marks, r| {
                cascade(
                    g,
                    seeds,
                    cfg.max_steps,
                    &mut run_coins(seed, r, cfg.p),
                    marks,
                )
                .len()
            },
        )
        .sum();
    Ok(total as f64 / cfg.num_sims as f64)
}

/// Sequential form of [`spread_mean`] reusing caller-owned marks; used where
/// the caller already parallelizes at a coarser level.
pub(crate) fn spread_mean_seq(
    g: &Graph,
    seeds: &[NodeId],
    cfg: &DiffusionConfig,
    seed: Seed,
    marks: &mut Marks,
) -> f64 {
    let total: usize = (0..cfg.num_sims)
        .map(|r| {
            cascade(
                g,
                seeds,
                cfg.max_steps,
                &mut run_coins(seed, r, cfg.p),
                marks,
            )
            .len()
        })
        .sum();
    total as f64 / cfg.num_sims as f64
}

/// Keeps each edge independently with probability `p`, in canonical edge order.
pub fn live_edge_snapshot<R: Rng + ?Sized>(g: &Graph, p: f64, rng: &mut R) -> Graph {
    let t = Threshold::from_probability(p);
    let kept = g.edges().filter(|_| t.accepts(rng.next_u64())).collect();
    g.rebuild(&kept).expect("subgraph of a valid graph")
}

/// Snapshot whose live edges are exactly those accepted by `coins`.
pub fn live_edge_snapshot_with(g: &Graph, coins: &HashedCoins) -> Graph {
    let kept = g.edges().filter(|&d| coins.is_live(d)).collect();
    g.rebuild(&kept).expect("subgraph of a valid graph")
}
