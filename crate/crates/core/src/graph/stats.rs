//! Structural statistics (the SNAP summary table quantities).

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;

use super::{sorted_intersection_count, Graph};
use crate::num::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct GraphStats<T> {
    pub nodes: usize,
    pub edges: usize,
    pub triangles: u64,
    pub isolates: usize,
    pub avg_clustering: T,
    pub largest_wcc_nodes: usize,
    pub largest_wcc_edges: usize,
    pub degree_histogram: BTreeMap<usize, usize>,
}

/// Triangles through each node, counted by sorted neighbor intersection.
pub(crate) fn triangles_per_node(g: &Graph) -> Vec<u64> {
    (0..g.node_count())
        .into_par_iter()
        .map(|u| {
            let nu = g.neighbors(u);
            let twice: usize = nu
                .iter()
                .map(|&v| sorted_intersection_count(nu, g.neighbors(v)))
                .sum();
            (twice / 2) as u64
        })
        .collect()
}

/// Connected components as a label per node; labels are assigned in order of
/// the lowest node in each component.
pub(crate) fn components(g: &Graph) -> (Vec<usize>, usize) {
    let n = g.node_count();
    let mut comp = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if comp[v] == usize::MAX {
                    comp[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    (comp, next)
}

pub fn graph_stats<T: Real>(g: &Graph) -> GraphStats<T> {
    let n = g.node_count();
    let tri = triangles_per_node(g);
    let triangles = tri.iter().sum::<u64>() / 3;

    let mut clustering_sum = 0.0_f64;
    let mut degree_histogram = BTreeMap::new();
    let mut isolates = 0;
    for (u, &t) in tri.iter().enumerate() {
        let d = g.degree(u);
        *degree_histogram.entry(d).or_insert(0) += 1;
        if d == 0 {
            isolates += 1;
        }
        if d >= 2 {
            clustering_sum += 2.0 * t as f64 / (d * (d - 1)) as f64;
        }
    }
    let avg_clustering = if n == 0 {
        0.0
    } else {
        clustering_sum / n as f64
    };

    let (comp, k) = components(g);
    let mut sizes = vec![0usize; k];
    let mut degree_sums = vec![0usize; k];
    for u in 0..n {
        sizes[comp[u]] += 1;
        degree_sums[comp[u]] += g.degree(u);
    }
    let (largest_wcc_nodes, largest_wcc_edges) = sizes
        .iter()
        .zip(&degree_sums)
        .map(|(&s, &d)| (s, d / 2))
        .fold((0, 0), |best, cur| if cur.0 > best.0 { cur } else { best });

    GraphStats {
        nodes: n,
        edges: g.edge_count(),
        triangles,
        isolates,
        avg_clustering: T::lit(avg_clustering),
        largest_wcc_nodes,
        largest_wcc_edges,
        degree_histogram,
    }
}
