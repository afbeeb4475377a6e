//! StaticGreedy: greedy coverage over a fixed pool of live-edge snapshots.

use rayon::prelude::*;

use crate::diffusion::{live_edge_snapshot_with, HashedCoins};
use crate::error::{Error, Result};
use crate::graph::stats::components;
use crate::graph::{Graph, NodeId};
use crate::rng::Seed;

struct Snapshot {
    component: Vec<u32>,
    size: Vec<u32>,
}

/// Draws `snapshots` live-edge graphs once (snapshot `r` from
/// `seed.child(r)`), then picks `k` nodes greedily by the number of newly
/// reached nodes summed over all snapshots. In an undirected snapshot the
/// nodes reachable from `v` form `v`'s connected component.
pub fn static_greedy(
    g: &Graph,
    k: usize,
    p: f64,
    snapshots: usize,
    seed: Seed,
) -> Result<Vec<NodeId>> {
    let n = g.node_count();
    if k > n {
        return Err(Error::Capacity {
            requested: k,
            available: n,
        });
    }
    if snapshots == 0 {
        return Err(Error::param("static greedy needs at least one snapshot"));
    }
    let pool: Vec<Snapshot> = (0..snapshots)
        .into_par_iter()
        .map(|r| {
            let live = live_edge_snapshot_with(g, &HashedCoins::new(seed.child(r as u64), p));
            let (comp, count) = components(&live);
            let mut size = vec![0u32; count];
            comp.iter().for_each(|&c| size[c] += 1);
            Snapshot {
                component: comp.into_iter().map(|c| c as u32).collect(),
                size,
            }
        })
        .collect();
    let mut covered: Vec<Vec<bool>> = pool.iter().map(|s| vec![false; s.size.len()]).collect();
    let mut taken = vec![false; n];
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let gains: Vec<u64> = (0..n)
            .into_par_iter()
            .map(|v| {
                if taken[v] {
                    return 0;
                }
                pool.iter()
                    .zip(&covered)
                    .map(|(snap, cov)| {
                        let c = snap.component[v] as usize;
                        if cov[c] {
                            0
                        } else {
                            snap.size[c] as u64
                        }
                    })
                    .sum()
            })
            .collect();
        let best = (0..n)
            .filter(|&v| !taken[v])
            .fold(None, |best: Option<NodeId>, v| match best {
                Some(b) if gains[b] >= gains[v] => Some(b),
                _ => Some(v),
            })
            .expect("k <= n leaves a candidate");
        taken[best] = true;
        chosen.push(best);
        for (snap, cov) in pool.iter().zip(covered.iter_mut()) {
            cov[snap.component[best] as usize] = true;
        }
    }
    Ok(chosen)
}
