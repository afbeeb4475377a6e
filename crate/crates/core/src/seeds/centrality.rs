//! Betweenness and PageRank centralities.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::graph::{Graph, NodeId};
use crate::num::Real;

/// Per-node centrality values.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralityScores<T> {
    pub scores: Vec<T>,
}

impl<T: Real> CentralityScores<T> {
    pub fn new(scores: Vec<T>) -> Self {
        CentralityScores { scores }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Node indices sorted by descending score, ties by ascending index.
    pub fn ranking(&self) -> Vec<NodeId> {
        let mut order: Vec<NodeId> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| {
            self.scores[b]
                .partial_cmp(&self.scores[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        order
    }
}

const SOURCE_CHUNK: usize = 64;

/// Single-source dependency accumulation from `s`, added into `acc`.
fn accumulate_source<T: Real>(
    g: &Graph,
    s: NodeId,
    scratch: &mut BrandesScratch<T>,
    acc: &mut [T],
) {
    let BrandesScratch {
        sigma,
        dist,
        delta,
        order,
        queue,
    } = scratch;
    order.clear();
    sigma.iter_mut().for_each(|x| *x = T::zero());
    dist.iter_mut().for_each(|d| *d = usize::MAX);
    delta.iter_mut().for_each(|x| *x = T::zero());
    sigma[s] = T::one();
    dist[s] = 0;
    queue.clear();
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
            if dist[v] == dist[u] + 1 {
                sigma[v] = sigma[v] + sigma[u];
            }
        }
    }
    for &w in order.iter().rev() {
        for &v in g.neighbors(w) {
            if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                delta[v] = delta[v] + sigma[v] / sigma[w] * (T::one() + delta[w]);
            }
        }
        if w != s {
            acc[w] = acc[w] + delta[w];
        }
    }
}

struct BrandesScratch<T> {
    sigma: Vec<T>,
    dist: Vec<usize>,
    delta: Vec<T>,
    order: Vec<NodeId>,
    queue: VecDeque<NodeId>,
}

impl<T: Real> BrandesScratch<T> {
    fn new(n: usize) -> Self {
        BrandesScratch {
            sigma: vec![T::zero(); n],
            dist: vec![usize::MAX; n],
            delta: vec![T::zero(); n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }
}

/// Exact unnormalized betweenness over unordered pairs, endpoints excluded.
///
/// Sources are processed in fixed-size chunks whose partial sums are combined
/// in chunk order, so the result does not depend on the thread count.
pub fn brandes_betweenness<T: Real>(g: &Graph) -> CentralityScores<T> {
    let n = g.node_count();
    let partials: Vec<Vec<T>> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut scratch = BrandesScratch::new(n);
            let mut acc = vec![T::zero(); n];
            for &s in chunk {
                accumulate_source(g, s, &mut scratch, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![T::zero(); n];
    for part in partials {
        for (t, x) in total.iter_mut().zip(part) {
            *t = *t + x;
        }
    }
    let half = T::lit(0.5);
    CentralityScores::new(total.into_iter().map(|x| x * half).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PageRankConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: 0.85,
            tol: 1e-8,
            max_iters: 100,
        }
    }
}

/// One power-iteration step: each undirected edge is a pair of directed
/// links, isolated nodes spread their mass uniformly.
pub fn pagerank_step<T: Real>(g: &Graph, damping: T, x: &[T]) -> Vec<T> {
    let n = g.node_count();
    let nt = T::count(n);
    let dangling: T = (0..n).filter(|&u| g.degree(u) == 0).map(|u| x[u]).sum();
    let base = (T::one() - damping) / nt + damping * dangling / nt;
    (0..n)
        .into_par_iter()
        .map(|v| {
            let inflow: T = g
                .neighbors(v)
                .iter()
                .map(|&u| x[u] / T::count(g.degree(u)))
                .sum();
            base + damping * inflow
        })
        .collect()
}

/// Power iteration from the uniform vector; stops when the L1 change drops
/// below `tol` or after `max_iters` steps. The result is renormalized to sum 1.
pub fn pagerank<T: Real>(g: &Graph, cfg: &PageRankConfig) -> CentralityScores<T> {
    let n = g.node_count();
    if n == 0 {
        return CentralityScores::new(Vec::new());
    }
    let d = T::lit(cfg.damping);
    let tol = T::lit(cfg.tol);
    let mut x = vec![T::one() / T::count(n); n];
    for _ in 0..cfg.max_iters {
        let next = pagerank_step(g, d, &x);
        let change: T = next.iter().zip(&x).map(|(a, b)| (*a - *b).abs()).sum();
        x = next;
        if change < tol {
            break;
        }
    }
    let total: T = x.iter().copied().sum();
    CentralityScores::new(x.into_iter().map(|v| v / total).collect())
}
