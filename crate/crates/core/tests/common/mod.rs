//! Test oracles shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use lpim_core::{Graph, NodeId};
use rand::seq::SliceRandom;
use rand::Rng;

/// G(n, p) by independent coin flips.
pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                pairs.push((i, j));
            }
        }
    }
    Graph::from_pairs(n, pairs).unwrap()
}

/// Ring lattice with `k/2` neighbours per side, each edge rewired with
/// probability `beta` to a uniform non-neighbour.
pub fn watts_strogatz<R: Rng>(n: usize, k: usize, beta: f64, rng: &mut R) -> Graph {
    let mut adj = vec![std::collections::BTreeSet::new(); n];
    for i in 0..n {
        for d in 1..=k / 2 {
            let j = (i + d) % n;
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    for d in 1..=k / 2 {
        for i in 0..n {
            let j = (i + d) % n;
            if rng.gen_bool(beta) && adj[i].contains(&j) {
                let candidates: Vec<usize> =
                    (0..n).filter(|&t| t != i && !adj[i].contains(&t)).collect();
                if candidates.is_empty() {
                    continue;
                }
                let t = candidates[rng.gen_range(0..candidates.len())];
                adj[i].remove(&j);
                adj[j].remove(&i);
                adj[i].insert(t);
                adj[t].insert(i);
            }
        }
    }
    let pairs = (0..n).flat_map(|i| {
        adj[i]
            .iter()
            .filter(move |&&j| j > i)
            .map(move |&j| (i, j))
            .collect::<Vec<_>>()
    });
    Graph::from_pairs(n, pairs).unwrap()
}

/// Exact expected spread for every seed subset (bitmask over `n ≤ 16`
/// nodes) under edge probability `num/den`, as integer numerators over
/// the common denominator `den^|E|`.
pub struct ExactSpread {
    pub n: usize,
    pub numerators: Vec<u128>,
    pub denominator: u128,
}

impl ExactSpread {
    pub fn new(g: &Graph, num: u32, den: u32) -> Self {
        let n = g.node_count();
        assert!(n <= 16 && num <= den);
        let edges: Vec<(usize, usize)> = g.edges().map(|d| d.pair()).collect();
        let m = edges.len();
        assert!(m <= 24, "too many edges for enumeration");
        let (num, den) = (num as u128, den as u128);
        let mut numerators = vec![0u128; 1 << n];
        let mut reach = vec![0u32; n];
        for world in 0u64..(1u64 << m) {
            let live = world.count_ones();
            let weight = num.pow(live) * (den - num).pow(m as u32 - live);
            if weight == 0 {
                continue;
            }
            let mut adj = vec![0u32; n];
            for (e, &(a, b)) in edges.iter().enumerate() {
                if world >> e & 1 == 1 {
                    adj[a] |= 1 << b;
                    adj[b] |= 1 << a;
                }
            }
            for (s, r) in reach.iter_mut().enumerate() {
                let mut seen = 1u32 << s;
                let mut frontier = seen;
                while frontier != 0 {
                    let mut next = 0;
                    let mut f = frontier;
                    while f != 0 {
                        let u = f.trailing_zeros() as usize;
                        f &= f - 1;
                        next |= adj[u];
                    }
                    frontier = next & !seen;
                    seen |= next;
                }
                *r = seen;
            }
            let mut covered = vec![0u32; 1 << n];
            for set in 1usize..(1 << n) {
                let low = set.trailing_zeros() as usize;
                covered[set] = covered[set & (set - 1)] | reach[low];
                numerators[set] += weight * covered[set].count_ones() as u128;
            }
        }
        ExactSpread {
            n,
            numerators,
            denominator: den.pow(m as u32),
        }
    }

    pub fn mask(nodes: &[NodeId]) -> usize {
        nodes.iter().fold(0, |m, &u| m | 1 << u)
    }

    pub fn sigma(&self, nodes: &[NodeId]) -> f64 {
        self.numerators[Self::mask(nodes)] as f64 / self.denominator as f64
    }

    /// Best `k`-subset by brute force.
    pub fn optimum(&self, k: usize) -> (usize, u128) {
        (0usize..1 << self.n)
            .filter(|s| s.count_ones() as usize == k)
            .map(|s| (s, self.numerators[s]))
            .max_by_key(|&(s, v)| (v, std::cmp::Reverse(s)))
            .unwrap()
    }

    /// Counts violations of monotonicity and of diminishing returns over
    /// all `A ⊆ B` and `c ∉ B`.
    pub fn violations(&self) -> (usize, usize) {
        let full = (1usize << self.n) - 1;
        let s = &self.numerators;
        let mut mono = 0;
        let mut sub = 0;
        for b in 0..=full {
            for c in 0..self.n {
                if b >> c & 1 == 1 {
                    continue;
                }
                let gain_b = s[b | 1 << c] as i128 - s[b] as i128;
                if gain_b < 0 {
                    mono += 1;
                }
                // Every subset A of B.
                let mut a = b;
                loop {
                    let gain_a = s[a | 1 << c] as i128 - s[a] as i128;
                    if gain_a < gain_b {
                        sub += 1;
                    }
                    if a == 0 {
                        break;
                    }
                    a = (a - 1) & b;
                }
            }
        }
        (mono, sub)
    }
}

/// Random graph on `n` nodes (G(n, q) with q itself random) trimmed to at
/// most `max_edges` edges.
pub fn small_random_graph<R: Rng>(n: usize, max_edges: usize, rng: &mut R) -> Graph {
    let q = rng.gen_range(0.15..0.7);
    let g = gnp(n, q, rng);
    let mut edges: Vec<_> = g.edges().map(|d| d.pair()).collect();
    edges.shuffle(rng);
    edges.truncate(max_edges);
    Graph::from_pairs(n, edges).unwrap()
}

/// Statistic values by direct definition on an adjacency matrix, in the
/// order edges, isolates, gwdegree, gwesp, gwdsp.
pub fn naive_statistics(g: &Graph, tau_d: f64, tau_s: f64, tau_p: f64) -> [f64; 5] {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for d in g.edges() {
        a[d.lo()][d.hi()] = true;
        a[d.hi()][d.lo()] = true;
    }
    let w = |tau: f64, k: usize| tau.exp() * (1.0 - (1.0 - (-tau).exp()).powi(k as i32));
    let deg: Vec<usize> = (0..n)
        .map(|i| a[i].iter().filter(|&&x| x).count())
        .collect();
    let mut out = [0.0; 5];
    out[0] = g.edge_count() as f64;
    out[1] = deg.iter().filter(|&&d| d == 0).count() as f64;
    out[2] = deg.iter().map(|&d| w(tau_d, d)).sum();
    for i in 0..n {
        for j in i + 1..n {
            let sp = (0..n).filter(|&h| a[i][h] && a[j][h]).count();
            if a[i][j] {
                out[3] += w(tau_s, sp);
            }
            out[4] += w(tau_p, sp);
        }
    }
    out
}

/// Outcome of one disjoint-triangles repetition.
pub struct TriangleTrial {
    pub removed_probability: f64,
    pub median_nonedge: f64,
    pub top_pick_is_removed: bool,
}

/// Thirty disjoint triangles with one random edge hidden; the completed
/// model should favour the dyad that closes the open triangle.
pub fn triangle_trial(seed: u64, medial: usize) -> TriangleTrial {
    use lpim_core::ergm::TermSet;
    use lpim_core::linkpred::{predict_links, LinkPredConfig, TrimMode};
    use lpim_core::{Dyad, Seed};

    let mut rng = Seed::new(seed).child(0).rng();
    let t = rng.gen_range(0..30);
    let e = rng.gen_range(0..3);
    let corners = [3 * t, 3 * t + 1, 3 * t + 2];
    let hidden = Dyad::new(corners[e], corners[(e + 1) % 3]).unwrap();
    let pairs = (0..30).flat_map(|t| {
        [
            (3 * t, 3 * t + 1),
            (3 * t + 1, 3 * t + 2),
            (3 * t, 3 * t + 2),
        ]
    });
    let observed = Graph::from_pairs(
        90,
        pairs.filter(|&(a, b)| Dyad::new(a, b).unwrap() != hidden),
    )
    .unwrap();
    let cfg = LinkPredConfig {
        num_medial_graphs: medial,
        trim: TrimMode::TopM(1),
        ..Default::default()
    };
    let terms = TermSet::standard(0.5, 0.5, 0.5).unwrap();
    let pred = predict_links(&observed, &terms, &cfg, Seed::new(seed).child(1)).unwrap();
    let mut values: Vec<f64> = Vec::new();
    for i in 0..90 {
        for j in i + 1..90 {
            if !observed.has_edge(i, j) {
                values.push(pred.map.get(Dyad::new(i, j).unwrap()));
            }
        }
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    let median = if values.len().is_multiple_of(2) {
        (values[mid - 1] + values[mid]) / 2.0
    } else {
        values[mid]
    };
    TriangleTrial {
        removed_probability: pred.map.get(hidden),
        median_nonedge: median,
        top_pick_is_removed: pred.kept.kept.contains(hidden),
    }
}
