//! ERGM link prediction: sample medial graphs, average them into edge
//! probabilities, pin observed edges to one and keep the most likely new
//! dyads.

use std::borrow::Borrow;
use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use log::warn;

use crate::ergm::{fit_mple, fold_samples, ErgmModel, McmcConfig, MpleConfig, TermSet};
use crate::error::{Error, Result};
use crate::graph::{add_edges, Dyad, EdgeSet, Graph};
use crate::num::Real;
use crate::rng::Seed;

/// Sparse symmetric dyad → probability map; absent dyads are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeProbabilityMap<T> {
    node_count: usize,
    values: BTreeMap<Dyad, T>,
}

impl<T: Real> EdgeProbabilityMap<T> {
    pub fn new(node_count: usize) -> Self {
        EdgeProbabilityMap {
            node_count,
            values: BTreeMap::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, d: Dyad) -> T {
        self.values.get(&d).copied().unwrap_or_else(T::zero)
    }

    pub fn insert(&mut self, d: Dyad, p: T) -> Result<()> {
        if d.hi() >= self.node_count {
            return Err(Error::InvalidNode {
                index: d.hi(),
                node_count: self.node_count,
            });
        }
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::param(format!("probability {p} outside [0, 1]")));
        }
        self.values.insert(d, p);
        Ok(())
    }

    /// Entries in ascending dyad order.
    pub fn iter(&self) -> impl Iterator<Item = (Dyad, T)> + '_ {
        self.values.iter().map(|(d, p)| (*d, *p))
    }

    /// `<label_i> <label_j> <probability>` lines in dyad order.
    pub fn write<W: Write>(&self, graph: &Graph, mut out: W) -> Result<()> {
        for (d, p) in self.iter() {
            writeln!(out, "{} {} {}", graph.label(d.lo()), graph.label(d.hi()), p)?;
        }
        Ok(())
    }
}

/// Edge-occurrence counts over a set of samples.
#[derive(Clone, Debug, Default)]
pub struct EdgeCounter {
    counts: HashMap<u64, u32>,
    samples: usize,
}

impl EdgeCounter {
    pub fn add<I: IntoIterator<Item = Dyad>>(&mut self, edges: I) {
        self.samples += 1;
        for d in edges {
            *self.counts.entry(d.key()).or_insert(0) += 1;
        }
    }

    pub fn merge(&mut self, other: EdgeCounter) {
        self.samples += other.samples;
        for (k, c) in other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// `count / samples` per dyad.
    pub fn into_map<T: Real>(self, node_count: usize) -> Result<EdgeProbabilityMap<T>> {
        if self.samples == 0 {
            return Err(Error::param("no samples to average"));
        }
        let total = T::count(self.samples);
        let values = self
            .counts
            .into_iter()
            .map(|(k, c)| {
                (
                    Dyad::of((k >> 32) as usize, (k & 0xFFFF_FFFF) as usize),
                    T::count(c as usize) / total,
                )
            })
            .collect();
        Ok(EdgeProbabilityMap { node_count, values })
    }
}

/// Fraction of samples containing each dyad.
pub fn average_samples<T, I, G>(samples: I, node_count: usize) -> Result<EdgeProbabilityMap<T>>
where
    T: Real,
    I: IntoIterator<Item = G>,
    G: Borrow<Graph>,
{
    let mut counter = EdgeCounter::default();
    for s in samples {
        let g = s.borrow();
        if g.node_count() != node_count {
            return Err(Error::NodeCountMismatch {
                node_count: g.node_count(),
                other: node_count,
            });
        }
        counter.add(g.edges());
    }
    counter.into_map(node_count)
}

/// Sets every observed edge to probability one.
pub fn force_observed<T: Real>(
    mut map: EdgeProbabilityMap<T>,
    observed: &Graph,
) -> Result<EdgeProbabilityMap<T>> {
    if observed.node_count() != map.node_count {
        return Err(Error::NodeCountMismatch {
            node_count: observed.node_count(),
            other: map.node_count,
        });
    }
    for d in observed.edges() {
        map.values.insert(d, T::one());
    }
    Ok(map)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrimMode<T> {
    /// Keep dyads whose probability is at least the threshold.
    Threshold(T),
    /// Keep the `m` most probable dyads, ties by lowest dyad.
    TopM(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trimmed {
    pub kept: EdgeSet,
    /// Requested minus available candidates in top-m mode.
    pub shortfall: usize,
}

/// Selects predicted dyads, never returning an edge of `observed`. Only
/// dyads present in the map are candidates.
pub fn trim<T: Real>(
    map: &EdgeProbabilityMap<T>,
    mode: TrimMode<T>,
    observed: &Graph,
) -> Result<Trimmed> {
    let candidates = map
        .iter()
        .filter(|(d, _)| !observed.has_edge(d.lo(), d.hi()));
    match mode {
        TrimMode::Threshold(theta) => {
            if !(theta >= T::zero() && theta <= T::one()) {
                return Err(Error::param(format!("threshold {theta} outside [0, 1]")));
            }
            Ok(Trimmed {
                kept: candidates
                    .filter(|(_, p)| *p >= theta)
                    .map(|(d, _)| d)
                    .collect(),
                shortfall: 0,
            })
        }
        TrimMode::TopM(m) => {
            let mut all: Vec<(Dyad, T)> = candidates.collect();
            // Stable: ties keep ascending dyad order.
            all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
            let shortfall = m.saturating_sub(all.len());
            if shortfall > 0 {
                warn!("top-{m} trim: only {} candidate dyads available", all.len());
            }
            Ok(Trimmed {
                kept: all.into_iter().take(m).map(|(d, _)| d).collect(),
                shortfall,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkPredConfig<T> {
    pub num_medial_graphs: usize,
    pub trim: TrimMode<T>,
    pub mple: MpleConfig,
    /// `None` uses [`McmcConfig::for_graph`] on the observed graph.
    pub mcmc: Option<McmcConfig>,
}

impl<T: Real> Default for LinkPredConfig<T> {
    fn default() -> Self {
        LinkPredConfig {
            num_medial_graphs: 1000,
            trim: TrimMode::Threshold(T::lit(0.5)),
            mple: MpleConfig::default(),
            mcmc: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Prediction<T> {
    /// Observed graph plus the kept predicted edges.
    pub added: Graph,
    pub map: EdgeProbabilityMap<T>,
    pub kept: Trimmed,
    pub model: ErgmModel<T>,
}

/// Medial-graph probabilities from an already fitted model.
pub fn medial_probabilities<T: Real>(
    model: &ErgmModel<T>,
    observed: &Graph,
    num_medial_graphs: usize,
    mcmc: &McmcConfig,
    seed: Seed,
) -> Result<EdgeProbabilityMap<T>> {
    let counters = fold_samples(
        model,
        observed,
        num_medial_graphs,
        mcmc,
        seed,
        EdgeCounter::default,
        |c, s| c.add(s.edges().iter().copied()),
    )?;
    let mut total = EdgeCounter::default();
    for c in counters {
        total.merge(c);
    }
    total.into_map(observed.node_count())
}

/// Fit, sample, average, pin observed edges, trim and complete the graph.
///
/// The fit draws from `seed.child(0)` and the sampler from `seed.child(1)`.
pub fn predict_links<T: Real>(
    observed: &Graph,
    terms: &TermSet<T>,
    cfg: &LinkPredConfig<T>,
    seed: Seed,
) -> Result<Prediction<T>> {
    let model = fit_mple(observed, terms, &cfg.mple, seed.child(0))?;
    let mcmc = cfg.mcmc.unwrap_or_else(|| McmcConfig::for_graph(observed));
    let map = medial_probabilities(
        &model,
        observed,
        cfg.num_medial_graphs,
        &mcmc,
        seed.child(1),
    )?;
    let map = force_observed(map, observed)?;
    let kept = trim(&map, cfg.trim, observed)?;
    let added = add_edges(observed, &kept.kept)?;
    Ok(Prediction {
        added,
        map,
        kept,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(a: usize, b: usize) -> Dyad {
        Dyad::of(a, b)
    }

    #[test]
    fn averaging_is_a_ratio() {
        let with = Graph::from_pairs(3, [(0, 1)]).unwrap();
        let without = Graph::empty(3);
        let samples: Vec<&Graph> = (0..1000)
            .map(|i| if i < 250 { &with } else { &without })
            .collect();
        let m: EdgeProbabilityMap<f64> = average_samples(samples, 3).unwrap();
        assert_eq!(m.get(d(0, 1)), 0.25);
        assert_eq!(m.get(d(1, 2)), 0.0);
        assert_eq!(m.len(), 1);
        let all: EdgeProbabilityMap<f32> = average_samples([&with, &with], 3).unwrap();
        assert_eq!(all.get(d(0, 1)), 1.0);
    }

    #[test]
    fn averaging_checks_node_counts() {
        let r = average_samples::<f64, _, _>([Graph::empty(3), Graph::empty(4)], 3);
        assert!(matches!(r, Err(Error::NodeCountMismatch { .. })));
        assert!(average_samples::<f64, _, Graph>(Vec::<Graph>::new(), 3).is_err());
    }

    #[test]
    fn force_observed_sets_one() {
        let mut m = EdgeProbabilityMap::<f64>::new(4);
        m.insert(d(0, 1), 0.3).unwrap();
        m.insert(d(2, 3), 0.7).unwrap();
        let obs = Graph::from_pairs(4, [(0, 1)]).unwrap();
        let forced = force_observed(m.clone(), &obs).unwrap();
        assert_eq!(forced.get(d(0, 1)), 1.0);
        assert_eq!(forced.get(d(2, 3)), 0.7);
        assert_eq!(force_observed(m.clone(), &Graph::empty(4)).unwrap(), m);
        assert!(m.insert(d(0, 2), 1.5).is_err());
    }

    #[test]
    fn threshold_is_inclusive() {
        let mut m = EdgeProbabilityMap::<f64>::new(4);
        m.insert(d(0, 1), 0.5).unwrap();
        m.insert(d(0, 2), 0.49).unwrap();
        m.insert(d(2, 3), 1.0).unwrap();
        let obs = Graph::from_pairs(4, [(2, 3)]).unwrap();
        let t = trim(&m, TrimMode::Threshold(0.5), &obs).unwrap();
        assert_eq!(t.kept, EdgeSet::from_pairs([(0, 1)]).unwrap());
    }

    #[test]
    fn top_m_selection() {
        let mut m = EdgeProbabilityMap::<f64>::new(5);
        m.insert(d(0, 1), 0.7).unwrap();
        m.insert(d(3, 4), 0.9).unwrap();
        m.insert(d(1, 2), 0.8).unwrap();
        m.insert(d(0, 4), 0.8).unwrap();
        let obs = Graph::empty(5);
        assert!(trim(&m, TrimMode::TopM(0), &obs).unwrap().kept.is_empty());
        let two = trim(&m, TrimMode::TopM(2), &obs).unwrap();
        assert_eq!(two.kept, EdgeSet::from_pairs([(3, 4), (0, 4)]).unwrap());
        let many = trim(&m, TrimMode::TopM(9), &obs).unwrap();
        assert_eq!((many.kept.len(), many.shortfall), (4, 5));
    }

    #[test]
    fn map_file_format() {
        let g = Graph::from_pairs(3, [(0, 1)])
            .unwrap()
            .with_labels(vec![5, 9, 2])
            .unwrap();
        let mut m = EdgeProbabilityMap::<f64>::new(3);
        m.insert(d(1, 2), 0.25).unwrap();
        m.insert(d(0, 1), 1.0).unwrap();
        let mut buf = Vec::new();
        m.write(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "5 9 1\n9 2 0.25\n");
    }

    #[test]
    fn predict_with_zero_budget_returns_observed() {
        let g = Graph::from_pairs(
            10,
            (0..10).flat_map(|i| [(i, (i + 1) % 10), (i, (i + 2) % 10)]),
        )
        .unwrap();
        let terms = TermSet::standard(0.5, 0.5, 0.5).unwrap();
        let cfg = LinkPredConfig {
            num_medial_graphs: 20,
            trim: TrimMode::TopM(0),
            ..Default::default()
        };
        let p = predict_links::<f64>(&g, &terms, &cfg, Seed::new(1)).unwrap();
        assert_eq!(p.added, g);
        assert!(p.map.iter().all(|(_, v)| (0.0..=1.0).contains(&v)));
        assert!(g.edges().all(|e| p.map.get(e) == 1.0));
    }
}
