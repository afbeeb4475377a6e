//! Greedy marginal-gain maximization of a spread function.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::diffusion::{spread_mean_seq, DiffusionConfig, Marks};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::Seed;

/// Set function evaluated by the greedy loop. Lazy evaluation returns the
/// exhaustive result only when the function is fixed and submodular.
pub trait SpreadOracle: Sync {
    fn spread(&self, seeds: &[NodeId]) -> f64;
}

impl<F: Fn(&[NodeId]) -> f64 + Sync> SpreadOracle for F {
    fn spread(&self, seeds: &[NodeId]) -> f64 {
        self(seeds)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GreedyStrategy {
    /// Re-evaluate every candidate in every round.
    #[default]
    Exhaustive,
    /// CELF: keep stale gains as upper bounds and only refresh the top.
    Lazy,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    gain: f64,
    node: NodeId,
    round: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // Max-heap on gain; among equal gains the lower node index is greater.
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then(other.node.cmp(&self.node))
    }
}

fn gain<O: SpreadOracle>(oracle: &O, base: f64, current: &[NodeId], v: NodeId) -> f64 {
    let mut with = Vec::with_capacity(current.len() + 1);
    with.extend_from_slice(current);
    with.push(v);
    oracle.spread(&with) - base
}

/// Selects `k` of `n` nodes by repeatedly adding the candidate with the
/// largest marginal gain; ties go to the lowest index. The empty set has
/// spread zero.
pub fn greedy_maximize<O: SpreadOracle>(
    n: usize,
    k: usize,
    oracle: &O,
    strategy: GreedyStrategy,
) -> Result<Vec<NodeId>> {
    if k > n {
        return Err(Error::Capacity {
            requested: k,
            available: n,
        });
    }
    let mut chosen: Vec<NodeId> = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    match strategy {
        GreedyStrategy::Exhaustive => {
            for _ in 0..k {
                let base = if chosen.is_empty() {
                    0.0
                } else {
                    oracle.spread(&chosen)
                };
                let gains: Vec<(NodeId, f64)> = (0..n)
                    .into_par_iter()
                    .filter(|&v| !taken[v])
                    .map(|v| (v, gain(oracle, base, &chosen, v)))
                    .collect();
                let mut best = gains[0];
                for &(v, g) in &gains[1..] {
                    if g > best.1 {
                        best = (v, g);
                    }
                }
                taken[best.0] = true;
                chosen.push(best.0);
            }
        }
        GreedyStrategy::Lazy => {
            if k == 0 {
                return Ok(chosen);
            }
            let mut heap: BinaryHeap<Entry> = (0..n)
                .into_par_iter()
                .map(|v| Entry {
                    gain: gain(oracle, 0.0, &[], v),
                    node: v,
                    round: 0,
                })
                .collect::<Vec<_>>()
                .into();
            let mut base = 0.0;
            let mut round = 0;
            while chosen.len() < k {
                let top = heap.pop().expect("candidates remain while k <= n");
                if top.round == round {
                    chosen.push(top.node);
                    round += 1;
                    if chosen.len() < k {
                        base = oracle.spread(&chosen);
                    }
                } else {
                    let g = gain(oracle, base, &chosen, top.node);
                    heap.push(Entry {
                        gain: g,
                        node: top.node,
                        round,
                    });
                }
            }
        }
    }
    Ok(chosen)
}

/// Monte Carlo spread with common random numbers: every evaluation runs on
/// the same `num_sims` hashed-coin worlds, so the estimate is itself a
/// coverage function.
pub struct MonteCarloOracle<'a> {
    pub graph: &'a Graph,
    pub config: DiffusionConfig,
    pub seed: Seed,
}

impl SpreadOracle for MonteCarloOracle<'_> {
    fn spread(&self, seeds: &[NodeId]) -> f64 {
        let mut marks = Marks::new(self.graph.node_count());
        spread_mean_seq(self.graph, seeds, &self.config, self.seed, &mut marks)
    }
}

/// Kempe-style greedy seed selection with Monte Carlo spread estimates.
pub fn greedy_im(
    g: &Graph,
    k: usize,
    cfg: &DiffusionConfig,
    seed: Seed,
    strategy: GreedyStrategy,
) -> Result<Vec<NodeId>> {
    cfg.validate()?;
    let oracle = MonteCarloOracle {
        graph: g,
        config: *cfg,
        seed,
    };
    greedy_maximize(g.node_count(), k, &oracle, strategy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coverage_oracle_both_strategies() {
        // Weighted coverage: node i covers sets[i].
        let sets: Vec<Vec<usize>> = vec![
            vec![0, 1, 2],
            vec![2, 3],
            vec![3, 4, 5, 6],
            vec![0],
            vec![6, 7],
        ];
        let oracle = |s: &[NodeId]| {
            let mut cov = [false; 8];
            s.iter()
                .for_each(|&i| sets[i].iter().for_each(|&e| cov[e] = true));
            cov.iter().filter(|&&c| c).count() as f64
        };
        let a = greedy_maximize(5, 3, &oracle, GreedyStrategy::Exhaustive).unwrap();
        let b = greedy_maximize(5, 3, &oracle, GreedyStrategy::Lazy).unwrap();
        assert_eq!(a, vec![2, 0, 4]);
        assert_eq!(a, b);
    }

    #[test]
    fn k_equals_n_and_too_large() {
        let oracle = |s: &[NodeId]| s.len() as f64;
        let all = greedy_maximize(4, 4, &oracle, GreedyStrategy::Lazy).unwrap();
        assert_eq!(all, vec![0, 1, 2, 3]);
        assert!(greedy_maximize(4, 5, &oracle, GreedyStrategy::Exhaustive).is_err());
        assert!(greedy_maximize(4, 0, &oracle, GreedyStrategy::Lazy)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn monte_carlo_greedy_picks_star_hub() {
        let star = Graph::from_pairs(6, (1..6).map(|i| (0, i))).unwrap();
        let cfg = DiffusionConfig::new(0.2, 500, 100).unwrap();
        let s = greedy_im(&star, 1, &cfg, Seed::new(3), GreedyStrategy::Exhaustive).unwrap();
        assert_eq!(s, vec![0]);
        let all = greedy_im(&star, 6, &cfg, Seed::new(3), GreedyStrategy::Exhaustive).unwrap();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
    }
}
