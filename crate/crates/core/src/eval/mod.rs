//! Evaluation protocol: hide edges, complete the graph by prediction and by
//! random insertion, then compare cascades seeded on each completion with
//! cascades on the original.

mod report;

pub use report::{
    best_results, run_experiment_grid, write_report_csv, write_trends_csv, ExperimentReport,
    GridConfig, ReportRow, TrendSeries, REPORT_HEADER,
};

use log::warn;
use rayon::prelude::*;

use crate::diffusion::{cascade, run_coins, CascadeResult, DiffusionConfig, Marks};
use crate::ergm::{ErgmModel, TermSet};
use crate::error::{Error, Result};
use crate::graph::{
    add_edges, remove_random_edges, sample_random_nonedges, EdgeSet, Graph, NodeId,
};
use crate::linkpred::{predict_links, LinkPredConfig, TrimMode};
use crate::num::Real;
use crate::rng::Seed;
use crate::seeds::{select_seeds, Method, SelectionParams};

/// Original graph, its observed part and the two completions.
#[derive(Clone, Debug)]
pub struct TrialGraphs<T> {
    pub original: Graph,
    pub observed: Graph,
    pub added: Graph,
    pub random: Graph,
    pub removed: EdgeSet,
    pub similarity: T,
    pub model: ErgmModel<T>,
    /// Predicted edges filled in uniformly because the probability map had
    /// too few candidates.
    pub shortfall: usize,
}

impl<T: Real> TrialGraphs<T> {
    /// Checks shared node sets, edge counts and containment.
    pub fn check(&self) -> Result<()> {
        let n = self.original.node_count();
        let target = self.observed.edge_count() + self.removed.len();
        let ok = [&self.observed, &self.added, &self.random]
            .iter()
            .all(|g| g.node_count() == n)
            && self.added.edge_count() == target
            && self.random.edge_count() == target
            && self.observed.is_edge_subgraph_of(&self.added)
            && self.observed.is_edge_subgraph_of(&self.random)
            && self.observed.is_edge_subgraph_of(&self.original);
        if ok {
            Ok(())
        } else {
            Err(Error::Invariant(
                "trial graphs violate the shared node set or edge count contract".into(),
            ))
        }
    }
}

/// Removes a `1 - f` fraction of edges, then restores the same number by
/// top-m prediction and by uniform non-edges.
///
/// Streams: removal `seed.child(0)`, prediction `seed.child(1)`, random
/// completion `seed.child(2)`, prediction fill-in `seed.child(3)`.
pub fn build_trial_graphs<T: Real>(
    original: &Graph,
    similarity: T,
    terms: &TermSet<T>,
    linkpred: &LinkPredConfig<T>,
    seed: Seed,
) -> Result<TrialGraphs<T>> {
    let f = similarity.as_f64();
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::param(format!(
            "similarity must lie in (0, 1), got {f}"
        )));
    }
    let (observed, removed) = remove_random_edges(original, f, &mut seed.child(0).rng())?;
    let m = removed.len();
    let cfg = LinkPredConfig {
        trim: TrimMode::TopM(m),
        ..linkpred.clone()
    };
    let prediction = predict_links(&observed, terms, &cfg, seed.child(1))?;
    let mut added = prediction.added;
    let shortfall = prediction.kept.shortfall;
    if shortfall > 0 {
        warn!("padding prediction with {shortfall} uniform non-edges");
        let fill = sample_random_nonedges(&added, shortfall, &mut seed.child(3).rng())?;
        added = add_edges(&added, &fill)?;
    }
    let extra = sample_random_nonedges(&observed, m, &mut seed.child(2).rng())?;
    let random = add_edges(&observed, &extra)?;
    let trial = TrialGraphs {
        original: original.clone(),
        observed,
        added,
        random,
        removed,
        similarity,
        model: prediction.model,
        shortfall,
    };
    trial.check()?;
    Ok(trial)
}

/// Intersection counts of one paired run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairedRun {
    /// `|O ∩ A|`
    pub added: usize,
    /// `|O ∩ R|`
    pub random: usize,
    /// `|O|`
    pub total: usize,
}

/// Mean intersection counts after a given number of rounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepMeans<T> {
    pub added: T,
    pub random: T,
    pub total: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult<T> {
    pub method: Method,
    pub c_mean: T,
    pub b_mean: T,
    pub t_mean: T,
    pub runs: Vec<PairedRun>,
    /// Entry `s` averages the sets active after `s` rounds.
    pub trend: Vec<StepMeans<T>>,
    pub seeds_original: Vec<NodeId>,
    pub seeds_added: Vec<NodeId>,
    pub seeds_random: Vec<NodeId>,
}

/// Per-step intersection counts of one run, saturating after the last entry.
struct RunTrend {
    added: Vec<usize>,
    random: Vec<usize>,
    total: Vec<usize>,
}

fn steps_of(res: &CascadeResult, stamp: &mut [u32]) {
    let mut prev = 0;
    for s in 0..=res.steps_taken() {
        let now = res.infected_by_step(s);
        for &u in &now[prev..] {
            stamp[u] = s as u32;
        }
        prev = now.len();
    }
}

/// Cumulative per-step counts of nodes active in both `other` and the
/// stamped original cascade.
fn overlap_by_step(other: &CascadeResult, stamp: &[u32], horizon: usize) -> Vec<usize> {
    let mut diff = vec![0usize; horizon + 1];
    let mut prev = 0;
    for s in 0..=other.steps_taken() {
        let now = other.infected_by_step(s);
        for &u in &now[prev..] {
            if stamp[u] != u32::MAX {
                diff[(stamp[u] as usize).max(s)] += 1;
            }
        }
        prev = now.len();
    }
    let mut acc = 0;
    diff.iter_mut().for_each(|d| {
        acc += *d;
        *d = acc;
    });
    diff
}

fn paired_run(
    trial_graphs: [&Graph; 3],
    seeds: [&[NodeId]; 3],
    cfg: &DiffusionConfig,
    coin_seed: Seed,
    r: usize,
    marks: &mut Marks,
    stamp: &mut [u32],
) -> (PairedRun, RunTrend) {
    let mut run = |i: usize| {
        let mut coins = run_coins(coin_seed, r, cfg.p);
        cascade(trial_graphs[i], seeds[i], cfg.max_steps, &mut coins, marks)
    };
    let o = run(0);
    let a = run(1);
    let b = run(2);
    let horizon = o.steps_taken().max(a.steps_taken()).max(b.steps_taken());
    steps_of(&o, stamp);
    let added = overlap_by_step(&a, stamp, horizon);
    let random = overlap_by_step(&b, stamp, horizon);
    for &u in o.infected() {
        stamp[u] = u32::MAX;
    }
    let total = (0..=horizon).map(|s| o.infected_by_step(s).len()).collect();
    let counts = PairedRun {
        added: last(&added),
        random: last(&random),
        total: o.len(),
    };
    (
        counts,
        RunTrend {
            added,
            random,
            total,
        },
    )
}

fn last(v: &[usize]) -> usize {
    *v.last().unwrap_or(&0)
}

fn sat(v: &[usize], s: usize) -> usize {
    v.get(s).or(v.last()).copied().unwrap_or(0)
}

/// Selects seeds on each of the three graphs and runs `num_sims` paired
/// cascades.
///
/// Seed selection draws from `seed.child(0)` on every graph and run `r` of
/// every graph uses the same edge coins from `seed.child(1)`, so identical
/// graphs yield identical counts.
pub fn run_trial<T: Real>(
    graphs: &TrialGraphs<T>,
    method: Method,
    params: &SelectionParams,
    seed: Seed,
) -> Result<TrialResult<T>> {
    let cfg = params.diffusion;
    cfg.validate()?;
    let n = graphs.original.node_count();
    if params.k == 0 || params.k > n {
        return Err(Error::param(format!(
            "k must lie in 1..={n}, got {}",
            params.k
        )));
    }
    let sel = seed.child(0);
    let so = select_seeds(&graphs.original, method, params, sel)?.nodes;
    let sa = select_seeds(&graphs.added, method, params, sel)?.nodes;
    let sr = select_seeds(&graphs.random, method, params, sel)?.nodes;
    let variants = [&graphs.original, &graphs.added, &graphs.random];
    let coin_seed = seed.child(1);
    let results: Vec<(PairedRun, RunTrend)> = (0..cfg.num_sims)
        .into_par_iter()
        .map_init(
            || (Marks::new(n), vec![u32::MAX; n]),
            |(marks, stamp), r| {
                paired_run(variants, [&so, &sa, &sr], &cfg, coin_seed, r, marks, stamp)
            },
        )
        .collect();

    let runs: Vec<PairedRun> = results.iter().map(|(c, _)| *c).collect();
    let sims = T::count(cfg.num_sims);
    let mean = |f: fn(&PairedRun) -> usize| T::count(runs.iter().map(f).sum::<usize>()) / sims;
    let horizon = results
        .iter()
        .map(|(_, t)| t.total.len())
        .max()
        .unwrap_or(1);
    let trend = (0..horizon)
        .map(|s| {
            let sum = |f: fn(&RunTrend) -> &Vec<usize>| {
                T::count(results.iter().map(|(_, t)| sat(f(t), s)).sum::<usize>()) / sims
            };
            StepMeans {
                added: sum(|t| &t.added),
                random: sum(|t| &t.random),
                total: sum(|t| &t.total),
            }
        })
        .collect();
    Ok(TrialResult {
        method,
        c_mean: mean(|r| r.added),
        b_mean: mean(|r| r.random),
        t_mean: mean(|r| r.total),
        runs,
        trend,
        seeds_original: so,
        seeds_added: sa,
        seeds_random: sr,
    })
}

/// Metrics of one cell. `m1` is absent when `t = 0` and `m2` when `b = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics<T> {
    pub m1: Option<T>,
    pub m2: Option<T>,
    pub m3: T,
}

/// `m1 = 100(c-b)/(t(1-f))`, `m2 = 100(c-b)/(b(1-f))`,
/// `m3 = scale (c-b)/(1-f)`.
pub fn compute_metrics<T: Real>(
    c: T,
    b: T,
    t: T,
    similarity: T,
    m3_scale: T,
) -> Result<Metrics<T>> {
    let one = T::one();
    if !(similarity > T::zero() && similarity < one) {
        return Err(Error::param(format!(
            "similarity must lie in (0, 1), got {similarity}"
        )));
    }
    let gap = one - similarity;
    let diff = c - b;
    let hundred = T::lit(100.0);
    let pct = |den: T| (den > T::zero()).then(|| hundred * diff / (den * gap));
    Ok(Metrics {
        m1: pct(t),
        m2: pct(b),
        m3: m3_scale * diff / gap,
    })
}
