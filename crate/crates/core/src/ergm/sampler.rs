//! Metropolis–Hastings sampling of graphs from a fitted model.
//!
//! Proposals toggle one dyad. With probability ½ the dyad is a uniformly
//! chosen existing edge, otherwise a uniformly chosen dyad (tie / no-tie).
//! When the graph is empty only the uniform branch is available. The
//! acceptance ratio is `exp(±θ·Δs) · q(y→x) / q(x→y)` with the exact
//! proposal probabilities of both branches.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use super::mple::ErgmModel;
use super::stats::{change_statistics_into, Adjacency};
use crate::error::{Error, Result};
use crate::graph::{Dyad, EdgeSet, Graph, NodeId};
use crate::num::Real;
use crate::rng::{Seed, StreamRng};

/// Mutable simple graph with O(1) uniform edge selection.
#[derive(Clone, Debug)]
pub struct DynGraph {
    adj: Vec<Vec<NodeId>>,
    edges: Vec<Dyad>,
    slot: HashMap<u64, usize>,
}

impl DynGraph {
    pub fn from_graph(g: &Graph) -> Self {
        let adj = (0..g.node_count())
            .map(|u| g.neighbors(u).to_vec())
            .collect();
        let edges: Vec<Dyad> = g.edges().collect();
        let slot = edges
            .iter()
            .enumerate()
            .map(|(i, d)| (d.key(), i))
            .collect();
        DynGraph { adj, edges, slot }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Dyad] {
        &self.edges
    }

    pub fn toggle(&mut self, d: Dyad) {
        let (a, b) = d.pair();
        if let Some(i) = self.slot.remove(&d.key()) {
            self.edges.swap_remove(i);
            if i < self.edges.len() {
                self.slot.insert(self.edges[i].key(), i);
            }
            for (u, v) in [(a, b), (b, a)] {
                let pos = self.adj[u].binary_search(&v).expect("symmetric adjacency");
                self.adj[u].remove(pos);
            }
        } else {
            self.slot.insert(d.key(), self.edges.len());
            self.edges.push(d);
            for (u, v) in [(a, b), (b, a)] {
                let pos = self.adj[u].binary_search(&v).unwrap_err();
                self.adj[u].insert(pos, v);
            }
        }
    }

    /// Snapshot carrying the labels of `template`.
    pub fn to_graph(&self, template: &Graph) -> Graph {
        let set: EdgeSet = self.edges.iter().copied().collect();
        template.rebuild(&set).expect("dyads within node range")
    }
}

impl Adjacency for DynGraph {
    fn node_count(&self) -> usize {
        self.adj.len()
    }

    fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McmcConfig {
    /// Proposals discarded before the first retained sample.
    pub burn_in: usize,
    /// Proposals between consecutive retained samples.
    pub thinning: usize,
    /// Independent chains; fixed so output does not depend on thread count.
    pub chains: usize,
}

impl McmcConfig {
    /// `20·m` burn-in and `2·m` thinning with `m = max(|E|, n)`.
    pub fn for_graph(g: &Graph) -> Self {
        let m = g.edge_count().max(g.node_count()).max(1);
        McmcConfig {
            burn_in: 20 * m,
            thinning: 2 * m,
            chains: 4,
        }
    }
}

/// One Markov chain. Iterating yields retained samples after burn-in.
pub struct Chain<'a, T> {
    model: &'a ErgmModel<T>,
    template: &'a Graph,
    state: DynGraph,
    rng: StreamRng,
    thinning: usize,
    burned: Option<usize>,
    delta: Vec<T>,
    accepted: u64,
    proposed: u64,
}

impl<'a, T: Real> Chain<'a, T> {
    pub fn new(model: &'a ErgmModel<T>, init: &'a Graph, mcmc: &McmcConfig, seed: Seed) -> Self {
        Chain {
            model,
            template: init,
            state: DynGraph::from_graph(init),
            rng: seed.rng(),
            thinning: mcmc.thinning.max(1),
            burned: Some(mcmc.burn_in),
            delta: vec![T::zero(); model.terms.len()],
            accepted: 0,
            proposed: 0,
        }
    }

    pub fn state(&self) -> &DynGraph {
        &self.state
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    fn proposal_prob(edges: usize, dyads: f64, is_edge: bool) -> f64 {
        if edges == 0 {
            1.0 / dyads
        } else if is_edge {
            0.5 / edges as f64 + 0.5 / dyads
        } else {
            0.5 / dyads
        }
    }

    /// One Metropolis–Hastings proposal.
    pub fn step(&mut self) {
        let n = self.state.node_count();
        if n < 2 {
            return;
        }
        let dyads = (n * (n - 1) / 2) as f64;
        let e = self.state.edge_count();
        let d = if e > 0 && self.rng.gen_bool(0.5) {
            self.state.edges[self.rng.gen_range(0..e)]
        } else {
            let a = self.rng.gen_range(0..n);
            let b = self.rng.gen_range(0..n - 1);
            Dyad::of(a, if b >= a { b + 1 } else { b })
        };
        let present = self.state.has_edge(d.lo(), d.hi());
        change_statistics_into(
            &self.state,
            d.lo(),
            d.hi(),
            &self.model.terms,
            &mut self.delta,
        );
        let dot: f64 = self
            .delta
            .iter()
            .zip(&self.model.theta)
            .map(|(a, b)| (*a * *b).as_f64())
            .sum();
        let after = if present { e - 1 } else { e + 1 };
        let log_q = (Self::proposal_prob(after, dyads, !present)
            / Self::proposal_prob(e, dyads, present))
        .ln();
        let log_alpha = if present { -dot } else { dot } + log_q;
        self.proposed += 1;
        if log_alpha >= 0.0 || self.rng.gen::<f64>().ln() < log_alpha {
            self.state.toggle(d);
            self.accepted += 1;
        }
    }

    fn advance(&mut self) {
        let steps = match self.burned.take() {
            Some(b) => b + self.thinning,
            None => self.thinning,
        };
        for _ in 0..steps {
            self.step();
        }
    }

    /// Advances to the next retained sample without materializing it.
    pub fn next_state(&mut self) -> &DynGraph {
        self.advance();
        &self.state
    }
}

impl<T: Real> Iterator for Chain<'_, T> {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        self.advance();
        Some(self.state.to_graph(self.template))
    }
}

/// Per-chain sample counts: `n_samples` split as evenly as possible, the
/// first chains taking the remainder.
pub(crate) fn chain_quota(n_samples: usize, chains: usize) -> Vec<usize> {
    let chains = chains.max(1);
    (0..chains)
        .map(|c| n_samples / chains + usize::from(c < n_samples % chains))
        .collect()
}

/// Runs `mcmc.chains` chains in parallel (chain `c` seeded by
/// `seed.child(c)`) and folds each retained sample into a per-chain
/// accumulator. Accumulators are returned in chain order.
pub fn fold_samples<T, A, M, F>(
    model: &ErgmModel<T>,
    init: &Graph,
    n_samples: usize,
    mcmc: &McmcConfig,
    seed: Seed,
    make: M,
    fold: F,
) -> Result<Vec<A>>
where
    T: Real,
    A: Send,
    M: Fn() -> A + Sync,
    F: Fn(&mut A, &DynGraph) + Sync,
{
    if n_samples == 0 {
        return Err(Error::param("at least one sample is required"));
    }
    if model.theta.len() != model.terms.len() {
        return Err(Error::Invariant(
            "theta length differs from term count".into(),
        ));
    }
    let quota = chain_quota(n_samples, mcmc.chains);
    Ok(quota
        .into_par_iter()
        .enumerate()
        .map(|(c, count)| {
            let mut acc = make();
            if count > 0 {
                let mut chain = Chain::new(model, init, mcmc, seed.child(c as u64));
                for _ in 0..count {
                    fold(&mut acc, chain.next_state());
                }
            }
            acc
        })
        .collect())
}

/// Retained samples ordered by (chain, index).
pub fn sample_graphs<T: Real>(
    model: &ErgmModel<T>,
    init: &Graph,
    n_samples: usize,
    mcmc: &McmcConfig,
    seed: Seed,
) -> Result<Vec<Graph>> {
    let per_chain = fold_samples(
        model,
        init,
        n_samples,
        mcmc,
        seed,
        Vec::new,
        |acc: &mut Vec<Graph>, s| acc.push(s.to_graph(init)),
    )?;
    Ok(per_chain.into_iter().flatten().collect())
}
