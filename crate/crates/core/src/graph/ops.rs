//! Edge-set surgery: random occlusion, union and random completion.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;

use super::{Dyad, EdgeSet, Graph};
use crate::error::{Error, Result};

/// `floor((1 - f) * edges)`.
///
/// A relative slack of 1e-9 absorbs representation error in `1 - f`
/// (e.g. `(1 - 0.8) * 10` evaluates to 1.9999999999999996).
pub fn removal_count(edges: usize, similarity: f64) -> usize {
    let raw = (1.0 - similarity) * edges as f64;
    (raw + raw.abs() * 1e-9 + 1e-12).floor().max(0.0) as usize
}

/// Removes `floor((1 - f)|E|)` edges chosen uniformly without replacement.
pub fn remove_random_edges<R: Rng + ?Sized>(
    g: &Graph,
    similarity: f64,
    rng: &mut R,
) -> Result<(Graph, EdgeSet)> {
    if !(similarity > 0.0 && similarity <= 1.0) {
        return Err(Error::param(format!(
            "similarity must lie in (0, 1], got {similarity}"
        )));
    }
    let edges: Vec<Dyad> = g.edges().collect();
    let m = removal_count(edges.len(), similarity);
    if m == 0 {
        return Ok((g.clone(), EdgeSet::new()));
    }
    let mut drop = vec![false; edges.len()];
    for i in sample(rng, edges.len(), m) {
        drop[i] = true;
    }
    let (removed, kept): (Vec<_>, Vec<_>) = edges.iter().zip(&drop).partition(|(_, &d)| d);
    let kept: EdgeSet = kept.into_iter().map(|(&e, _)| e).collect();
    let removed: EdgeSet = removed.into_iter().map(|(&e, _)| e).collect();
    Ok((g.rebuild(&kept)?, removed))
}

/// Union of `g`'s edges with `extra`. Existing edges are ignored.
pub fn add_edges(g: &Graph, extra: &EdgeSet) -> Result<Graph> {
    if extra.is_empty() {
        return Ok(g.clone());
    }
    for d in extra.iter() {
        g.check_node(d.hi())?;
    }
    let all: EdgeSet = g.edges().chain(extra.iter()).collect();
    g.rebuild(&all)
}

/// `m` distinct dyads drawn uniformly from the non-edges of `g`.
pub fn sample_random_nonedges<R: Rng + ?Sized>(
    g: &Graph,
    m: usize,
    rng: &mut R,
) -> Result<EdgeSet> {
    let n = g.node_count();
    let available = g.dyad_count() - g.edge_count();
    if m > available {
        return Err(Error::Capacity {
            requested: m,
            available,
        });
    }
    if m == 0 {
        return Ok(EdgeSet::new());
    }
    if m * 2 <= available {
        // Sparse request: rejection sampling over uniform unordered pairs.
        let mut chosen: HashSet<Dyad> = HashSet::with_capacity(m);
        let mut order = Vec::with_capacity(m);
        while order.len() < m {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n - 1);
            let b = if b >= a { b + 1 } else { b };
            let d = Dyad::of(a, b);
            if !g.has_edge(a, b) && chosen.insert(d) {
                order.push(d);
            }
        }
        Ok(order.into_iter().collect())
    } else {
        let candidates: Vec<Dyad> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| Dyad::of(u, v)))
            .filter(|d| !g.has_edge(d.lo(), d.hi()))
            .collect();
        Ok(sample(rng, candidates.len(), m)
            .into_iter()
            .map(|i| candidates[i])
            .collect())
    }
}
