mod common;

use std::collections::BTreeSet;
use std::io::Cursor;

use lpim_core::graph::{
    graph_stats, load_snap_edge_list, read_edge_set, removal_count, remove_random_edges,
    sample_random_nonedges, write_edge_set, write_snap_edge_list,
};
use lpim_core::{Dyad, Graph, Seed};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..(n * 3)).prop_map(move |pairs| {
            let pairs: BTreeSet<(usize, usize)> = pairs
                .into_iter()
                .filter(|(a, b)| a != b)
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            Graph::from_pairs(n, pairs).unwrap()
        })
    })
}

fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for d in g.edges() {
        a[d.lo()][d.hi()] = true;
        a[d.hi()][d.lo()] = true;
    }
    a
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stats_match_brute_force(g in arb_graph(50)) {
        let n = g.node_count();
        let a = adjacency(&g);
        let mut tri = 0u64;
        let mut clustering = 0.0;
        for i in 0..n {
            let nb: Vec<usize> = (0..n).filter(|&j| a[i][j]).collect();
            let mut closed = 0usize;
            for x in 0..nb.len() {
                for y in x + 1..nb.len() {
                    if a[nb[x]][nb[y]] {
                        closed += 1;
                        if i < nb[x] {
                            tri += 1;
                        }
                    }
                }
            }
            if nb.len() >= 2 {
                clustering += 2.0 * closed as f64 / (nb.len() * (nb.len() - 1)) as f64;
            }
        }
        let mut parent: Vec<usize> = (0..n).collect();
        for d in g.edges() {
            let (x, y) = (find(&mut parent, d.lo()), find(&mut parent, d.hi()));
            parent[x] = y;
        }
        let mut sizes = std::collections::HashMap::new();
        for u in 0..n {
            let r = find(&mut parent, u);
            *sizes.entry(r).or_insert(0usize) += 1;
        }
        let s = graph_stats::<f64>(&g);
        prop_assert_eq!(s.triangles, tri);
        prop_assert!((s.avg_clustering - clustering / n as f64).abs() < 1e-12);
        prop_assert_eq!(s.largest_wcc_nodes, *sizes.values().max().unwrap());
        prop_assert_eq!(s.isolates, (0..n).filter(|&u| g.degree(u) == 0).count());
        prop_assert_eq!(s.degree_histogram.values().sum::<usize>(), n);
        let s32 = graph_stats::<f32>(&g);
        prop_assert_eq!(s32.triangles, tri);
    }

    #[test]
    fn adjacency_is_symmetric_and_sorted(g in arb_graph(40)) {
        for u in 0..g.node_count() {
            let nb = g.neighbors(u);
            prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for &v in nb {
                prop_assert!(g.neighbors(v).contains(&u));
                prop_assert!(v != u);
            }
        }
        prop_assert_eq!(g.edges().count(), g.edge_count());
    }

    #[test]
    fn snap_round_trip(g in arb_graph(30), offset in 0u64..1000) {
        let labels: Vec<u64> = (0..g.node_count() as u64).map(|i| i * 7 + offset).collect();
        let g = g.with_labels(labels).unwrap();
        let mut buf = Vec::new();
        write_snap_edge_list(&g, &mut buf).unwrap();
        let back = load_snap_edge_list(Cursor::new(buf)).unwrap();
        let labelled = |h: &Graph| -> BTreeSet<(u64, u64)> {
            h.edges().map(|d| {
                let (a, b) = (h.label(d.lo()), h.label(d.hi()));
                (a.min(b), a.max(b))
            }).collect()
        };
        prop_assert_eq!(labelled(&back), labelled(&g));
        // Nodes without edges do not appear in an edge list.
        prop_assert_eq!(back.node_count(), (0..g.node_count()).filter(|&u| g.degree(u) > 0).count());
    }

    #[test]
    fn edge_set_round_trip(g in arb_graph(30)) {
        let set = g.edge_set();
        let mut buf = Vec::new();
        write_edge_set(&set, &g, &mut buf).unwrap();
        prop_assert_eq!(read_edge_set(Cursor::new(buf), &g).unwrap(), set);
    }

    #[test]
    fn removal_and_restoration_counts(g in arb_graph(40), f in 0.05f64..0.99, seed in any::<u64>()) {
        prop_assume!(g.edge_count() > 0);
        let mut rng = Seed::new(seed).rng();
        let (observed, removed) = remove_random_edges(&g, f, &mut rng).unwrap();
        prop_assert_eq!(removed.len(), removal_count(g.edge_count(), f));
        prop_assert_eq!(observed.edge_count() + removed.len(), g.edge_count());
        prop_assert!(observed.is_edge_subgraph_of(&g));
        prop_assert!(removed.iter().all(|d| g.has_edge(d.lo(), d.hi()) && !observed.has_edge(d.lo(), d.hi())));
        let free = observed.dyad_count() - observed.edge_count();
        let m = removed.len().min(free);
        let extra = sample_random_nonedges(&observed, m, &mut rng).unwrap();
        prop_assert_eq!(extra.len(), m);
        prop_assert!(extra.iter().all(|d| !observed.has_edge(d.lo(), d.hi())));
    }
}

#[test]
fn removal_count_examples() {
    assert_eq!(removal_count(14496, 0.9), 1449);
    assert_eq!(removal_count(10, 0.9), 1);
    assert_eq!(removal_count(10, 0.7), 3);
    assert_eq!(removal_count(25998, 0.75), 6499);
}

#[test]
fn k5_single_removal_is_uniform() {
    let k5 = Graph::from_pairs(5, (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j)))).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 20000;
    let mut counts = std::collections::HashMap::new();
    for _ in 0..trials {
        let (_, removed) = remove_random_edges(&k5, 0.9, &mut rng).unwrap();
        assert_eq!(removed.len(), 1);
        *counts.entry(removed.as_slice()[0]).or_insert(0usize) += 1;
    }
    assert_eq!(counts.len(), 10);
    let p = 0.1;
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    for c in counts.values() {
        assert!((*c as f64 - trials as f64 * p).abs() < 5.0 * sd, "{c}");
    }
}

#[test]
fn nonedge_sampling_is_uniform() {
    // Path on 4 nodes has 3 non-edges: (0,2), (0,3), (1,3).
    let g = Graph::from_pairs(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let trials = 9000;
    let mut counts = std::collections::HashMap::new();
    for _ in 0..trials {
        let s = sample_random_nonedges(&g, 1, &mut rng).unwrap();
        *counts.entry(s.as_slice()[0]).or_insert(0usize) += 1;
    }
    let sd = (trials as f64 / 3.0 * (2.0 / 3.0)).sqrt();
    for d in [
        Dyad::new(0, 2).unwrap(),
        Dyad::new(0, 3).unwrap(),
        Dyad::new(1, 3).unwrap(),
    ] {
        assert!((counts[&d] as f64 - trials as f64 / 3.0).abs() < 5.0 * sd);
    }
    assert!(sample_random_nonedges(&g, 4, &mut rng).is_err());
    assert_eq!(sample_random_nonedges(&g, 3, &mut rng).unwrap().len(), 3);
}

#[test]
fn small_world_generator_is_clustered() {
    let g = common::watts_strogatz(300, 8, 0.1, &mut ChaCha8Rng::seed_from_u64(1));
    assert_eq!(g.edge_count(), 1200);
    let s = graph_stats::<f64>(&g);
    assert!(s.avg_clustering > 0.4, "{}", s.avg_clustering);
}
