//! Sufficient statistics and their single-dyad change values.

use std::collections::HashMap;

use super::terms::{GeoWeights, TermKind, TermSet};
use crate::error::{Error, Result};
use crate::graph::{sorted_intersection_count, Graph, NodeId};
use crate::num::Real;

/// Statistic values, one per term in term order.
#[derive(Clone, Debug, PartialEq)]
pub struct StatVector<T> {
    pub values: Vec<T>,
}

impl<T: Real> StatVector<T> {
    pub fn dot(&self, theta: &[T]) -> T {
        self.values.iter().zip(theta).map(|(a, b)| *a * *b).sum()
    }
}

/// Read access to a simple undirected graph with sorted neighbor lists.
pub trait Adjacency {
    fn node_count(&self) -> usize;
    fn neighbors(&self, u: NodeId) -> &[NodeId];

    fn degree(&self, u: NodeId) -> usize {
        self.neighbors(u).len()
    }

    fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    fn shared_partners(&self, u: NodeId, v: NodeId) -> usize {
        sorted_intersection_count(self.neighbors(u), self.neighbors(v))
    }
}

impl Adjacency for Graph {
    fn node_count(&self) -> usize {
        Graph::node_count(self)
    }

    fn neighbors(&self, u: NodeId) -> &[NodeId] {
        Graph::neighbors(self, u)
    }
}

fn weighted_histogram<T: Real>(w: &GeoWeights<T>, hist: &[usize]) -> T {
    // Ascending index order keeps the sum deterministic.
    hist.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| w.weight(i) * T::count(c))
        .sum()
}

fn histogram(counts: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut hist = Vec::new();
    for c in counts {
        if c >= hist.len() {
            hist.resize(c + 1, 0);
        }
        hist[c] += 1;
    }
    hist
}

/// Edgewise shared-partner histogram `EP_i`.
pub(crate) fn esp_histogram<G: Adjacency>(g: &G) -> Vec<usize> {
    let n = g.node_count();
    histogram((0..n).flat_map(|u| {
        g.neighbors(u)
            .iter()
            .filter(move |&&v| v > u)
            .map(move |&v| g.shared_partners(u, v))
    }))
}

/// Dyadwise shared-partner histogram `DP_i` for `i >= 1`; entry 0 is unused.
pub(crate) fn dsp_histogram<G: Adjacency>(g: &G) -> Vec<usize> {
    let mut pairs: HashMap<u64, usize> = HashMap::new();
    for k in 0..g.node_count() {
        let nk = g.neighbors(k);
        for (a_i, &a) in nk.iter().enumerate() {
            for &b in &nk[a_i + 1..] {
                *pairs.entry(((a as u64) << 32) | b as u64).or_insert(0) += 1;
            }
        }
    }
    let mut hist = histogram(pairs.into_values());
    if !hist.is_empty() {
        hist[0] = 0;
    }
    hist
}

/// Exact statistics by full enumeration, using the closed forms
/// `Σ_i w(i) · H_i` over the degree, edgewise and dyadwise histograms.
pub fn compute_statistics<T: Real, G: Adjacency>(g: &G, terms: &TermSet<T>) -> StatVector<T> {
    let n = g.node_count();
    let values = terms
        .terms()
        .iter()
        .map(|t| match t.kind {
            TermKind::Edges => T::count((0..n).map(|u| g.degree(u)).sum::<usize>() / 2),
            TermKind::Isolates => T::count((0..n).filter(|&u| g.degree(u) == 0).count()),
            TermKind::GwDegree => weighted_histogram(
                &t.weights().unwrap(),
                &histogram((0..n).map(|u| g.degree(u))),
            ),
            TermKind::GwEsp => weighted_histogram(&t.weights().unwrap(), &esp_histogram(g)),
            TermKind::GwDsp => weighted_histogram(&t.weights().unwrap(), &dsp_histogram(g)),
        })
        .collect();
    StatVector { values }
}

/// `s(G + ij) - s(G - ij)`, evaluated locally around `i` and `j`.
///
/// Every quantity is taken in `G - ij`: degrees drop by one and shared
/// partner counts involving the dyad's own endpoints drop by one when the
/// edge is currently present.
pub fn change_statistics<T: Real, G: Adjacency>(
    g: &G,
    i: NodeId,
    j: NodeId,
    terms: &TermSet<T>,
) -> Result<StatVector<T>> {
    if i == j {
        return Err(Error::SelfLoop(i));
    }
    let n = g.node_count();
    if i >= n || j >= n {
        return Err(Error::InvalidNode {
            index: i.max(j),
            node_count: n,
        });
    }
    let mut out = vec![T::zero(); terms.len()];
    change_statistics_into(g, i, j, terms, &mut out);
    Ok(StatVector { values: out })
}

pub(crate) fn change_statistics_into<T: Real, G: Adjacency>(
    g: &G,
    i: NodeId,
    j: NodeId,
    terms: &TermSet<T>,
    out: &mut [T],
) {
    let present = usize::from(g.has_edge(i, j));
    let di = g.degree(i) - present;
    let dj = g.degree(j) - present;
    for (slot, t) in out.iter_mut().zip(terms.terms()) {
        *slot = match t.kind {
            TermKind::Edges => T::one(),
            TermKind::Isolates => -T::count(usize::from(di == 0) + usize::from(dj == 0)),
            TermKind::GwDegree => {
                let w = t.weights().unwrap();
                w.increment(di) + w.increment(dj)
            }
            TermKind::GwEsp => {
                let w = t.weights().unwrap();
                let (ni, nj) = (g.neighbors(i), g.neighbors(j));
                let mut shared = 0;
                let mut delta = T::zero();
                let (mut a, mut b) = (0, 0);
                while a < ni.len() && b < nj.len() {
                    match ni[a].cmp(&nj[b]) {
                        std::cmp::Ordering::Less => a += 1,
                        std::cmp::Ordering::Greater => b += 1,
                        std::cmp::Ordering::Equal => {
                            let k = ni[a];
                            shared += 1;
                            // j (resp. i) is a partner of (i,k) (resp. (j,k))
                            // only through the toggled edge.
                            delta = delta
                                + w.increment(g.shared_partners(i, k) - present)
                                + w.increment(g.shared_partners(j, k) - present);
                            a += 1;
                            b += 1;
                        }
                    }
                }
                delta + w.weight(shared)
            }
            TermKind::GwDsp => {
                let w = t.weights().unwrap();
                let mut delta = T::zero();
                for &k in g.neighbors(j) {
                    if k != i {
                        delta = delta + w.increment(g.shared_partners(i, k) - present);
                    }
                }
                for &k in g.neighbors(i) {
                    if k != j {
                        delta = delta + w.increment(g.shared_partners(j, k) - present);
                    }
                }
                delta
            }
        };
    }
}
