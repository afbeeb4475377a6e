//! IMRank: self-consistent ranking by last-to-first influence allocation.
//!
//! Starting from a degree ranking, each iteration gives every node one unit
//! of score and sweeps the ranking from the bottom up. The visited node `u`
//! passes a fraction `p` of its residual score to each higher-ranked node
//! within `hops` hops, visiting those nodes from the top of the ranking
//! down. Nodes are then re-ranked by score (stable). The loop ends after
//! `iters` iterations or once the ranking stops changing.

use std::collections::VecDeque;

use crate::graph::{Graph, NodeId};

/// Higher-ranked nodes within `hops` of `u`, best rank first.
fn superiors(
    g: &Graph,
    u: NodeId,
    hops: usize,
    position: &[usize],
    dist: &mut [usize],
    touched: &mut Vec<NodeId>,
) -> Vec<NodeId> {
    let mut out = Vec::new();
    if hops == 1 {
        out.extend(
            g.neighbors(u)
                .iter()
                .copied()
                .filter(|&v| position[v] < position[u]),
        );
    } else {
        let mut queue = VecDeque::from([u]);
        dist[u] = 0;
        touched.push(u);
        while let Some(x) = queue.pop_front() {
            if dist[x] == hops {
                continue;
            }
            for &y in g.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    touched.push(y);
                    queue.push_back(y);
                    if position[y] < position[u] {
                        out.push(y);
                    }
                }
            }
        }
        for &t in touched.iter() {
            dist[t] = usize::MAX;
        }
        touched.clear();
    }
    out.sort_unstable_by_key(|&v| position[v]);
    out
}

/// Final ranking after the allocation iterations (all nodes, best first).
pub fn imrank_ranking(g: &Graph, p: f64, hops: usize, iters: usize) -> Vec<NodeId> {
    let n = g.node_count();
    let mut ranking: Vec<NodeId> = (0..n).collect();
    ranking.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    let mut position = vec![0; n];
    let mut dist = vec![usize::MAX; n];
    let mut touched = Vec::new();
    let hops = hops.max(1);
    for _ in 0..iters {
        for (i, &u) in ranking.iter().enumerate() {
            position[u] = i;
        }
        let mut score = vec![1.0_f64; n];
        for &u in ranking.iter().rev() {
            for v in superiors(g, u, hops, &position, &mut dist, &mut touched) {
                let t = p * score[u];
                score[v] += t;
                score[u] -= t;
            }
        }
        let mut next = ranking.clone();
        // Stable sort keeps the previous order among equal scores.
        next.sort_by(|&a, &b| score[b].total_cmp(&score[a]));
        if next == ranking {
            break;
        }
        ranking = next;
    }
    ranking
}

/// Top `k` of [`imrank_ranking`]; `k` is clamped to the node count.
pub fn imrank(g: &Graph, k: usize, p: f64, hops: usize, iters: usize) -> Vec<NodeId> {
    let mut r = imrank_ranking(g, p, hops, iters);
    r.truncate(k);
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_iterations_is_degree_order() {
        let g = Graph::from_pairs(5, [(3, 0), (3, 1), (3, 2), (1, 2), (4, 0)]).unwrap();
        assert_eq!(imrank(&g, 5, 0.1, 1, 0), vec![3, 0, 1, 2, 4]);
    }

    #[test]
    fn cycle_keeps_index_order() {
        let c6 = Graph::from_pairs(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        for &p in &[0.05, 0.25, 0.5, 0.9] {
            for iters in [1, 3, 10] {
                assert_eq!(imrank(&c6, 6, p, 1, iters), vec![0, 1, 2, 3, 4, 5]);
            }
        }
    }

    #[test]
    fn star_hub_first() {
        let star = Graph::from_pairs(5, (1..5).map(|i| (0, i))).unwrap();
        assert_eq!(imrank(&star, 1, 0.25, 1, 1), vec![0]);
        assert_eq!(imrank(&star, 1, 0.25, 1, 10), vec![0]);
    }

    #[test]
    fn multi_hop_returns_permutation() {
        let g = Graph::from_pairs(
            10,
            [
                (0, 1),
                (0, 2),
                (0, 3),
                (4, 5),
                (5, 6),
                (6, 7),
                (4, 8),
                (8, 9),
            ],
        )
        .unwrap();
        assert_eq!(imrank(&g, 10, 0.9, 1, 0)[0], 0);
        let mut s = imrank(&g, 10, 0.9, 3, 10);
        s.sort();
        assert_eq!(s, (0..10).collect::<Vec<_>>());
        assert_eq!(imrank(&g, 20, 0.5, 1, 2).len(), 10);
    }
}
