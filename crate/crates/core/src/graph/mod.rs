//! Undirected simple graphs with dense node indexing.

mod io;
mod ops;
pub(crate) mod stats;

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use io::{
    load_snap_edge_list, load_snap_edge_list_with_report, read_edge_set, write_edge_set,
    write_snap_edge_list, LoadReport,
};
pub use ops::{add_edges, removal_count, remove_random_edges, sample_random_nonedges};
pub use stats::{graph_stats, GraphStats};

/// Dense node index in `[0, node_count)`.
pub type NodeId = usize;

/// Unordered node pair stored canonically with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dyad {
    lo: NodeId,
    hi: NodeId,
}

impl Dyad {
    pub fn new(a: NodeId, b: NodeId) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Dyad { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Ok(Dyad { lo: b, hi: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfLoop(a)),
        }
    }

    /// Caller guarantees `a != b`.
    #[inline]
    pub(crate) fn of(a: NodeId, b: NodeId) -> Self {
        debug_assert_ne!(a, b);
        if a < b {
            Dyad { lo: a, hi: b }
        } else {
            Dyad { lo: b, hi: a }
        }
    }

    #[inline]
    pub fn lo(self) -> NodeId {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> NodeId {
        self.hi
    }

    #[inline]
    pub fn pair(self) -> (NodeId, NodeId) {
        (self.lo, self.hi)
    }

    /// Packs the dyad into one word; used as a hash key.
    #[inline]
    pub(crate) fn key(self) -> u64 {
        ((self.lo as u64) << 32) | self.hi as u64
    }
}

/// Sorted, deduplicated list of dyads.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeSet {
    dyads: Vec<Dyad>,
}

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (NodeId, NodeId)>>(pairs: I) -> Result<Self> {
        let dyads = pairs
            .into_iter()
            .map(|(a, b)| Dyad::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(dyads.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.dyads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dyads.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Dyad> + '_ {
        self.dyads.iter().copied()
    }

    pub fn as_slice(&self) -> &[Dyad] {
        &self.dyads
    }

    pub fn contains(&self, d: Dyad) -> bool {
        self.dyads.binary_search(&d).is_ok()
    }
}

impl FromIterator<Dyad> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = Dyad>>(iter: I) -> Self {
        let mut dyads: Vec<Dyad> = iter.into_iter().collect();
        dyads.sort_unstable();
        dyads.dedup();
        EdgeSet { dyads }
    }
}

/// Immutable undirected simple graph in compressed adjacency form.
///
/// Neighbor lists are sorted, symmetric, and free of self-loops and
/// duplicates. `labels[i]` is the original file label of node `i`; graphs
/// derived from a loaded graph share its label table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    labels: Arc<[u64]>,
}

impl Graph {
    pub fn empty(node_count: usize) -> Self {
        Graph {
            offsets: vec![0; node_count + 1],
            targets: Vec::new(),
            labels: (0..node_count as u64).collect(),
        }
    }

    /// Builds a graph from arbitrary dyads; duplicates collapse.
    pub fn from_dyads<I: IntoIterator<Item = Dyad>>(node_count: usize, dyads: I) -> Result<Self> {
        let set: EdgeSet = dyads.into_iter().collect();
        Self::from_edge_set(node_count, &set)
    }

    /// Convenience constructor from raw pairs. Self-loops are rejected.
    pub fn from_pairs<I: IntoIterator<Item = (NodeId, NodeId)>>(
        node_count: usize,
        pairs: I,
    ) -> Result<Self> {
        Self::from_edge_set(node_count, &EdgeSet::from_pairs(pairs)?)
    }

    pub fn from_edge_set(node_count: usize, set: &EdgeSet) -> Result<Self> {
        let labels: Arc<[u64]> = (0..node_count as u64).collect();
        Self::build(node_count, set.as_slice(), labels)
    }

    fn build(node_count: usize, dyads: &[Dyad], labels: Arc<[u64]>) -> Result<Self> {
        let mut degree = vec![0usize; node_count];
        for d in dyads {
            if d.hi >= node_count {
                return Err(Error::InvalidNode {
                    index: d.hi,
                    node_count,
                });
            }
            degree[d.lo] += 1;
            degree[d.hi] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut acc = 0;
        offsets.push(0);
        for &d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut fill = offsets[..node_count].to_vec();
        let mut targets = vec![0; acc];
        for d in dyads {
            targets[fill[d.lo]] = d.hi;
            fill[d.lo] += 1;
            targets[fill[d.hi]] = d.lo;
            fill[d.hi] += 1;
        }
        for u in 0..node_count {
            targets[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        Ok(Graph {
            offsets,
            targets,
            labels,
        })
    }

    /// Same node set and labels, different edges.
    pub(crate) fn rebuild(&self, set: &EdgeSet) -> Result<Self> {
        Self::build(self.node_count(), set.as_slice(), self.labels.clone())
    }

    /// Replaces the label table. Labels must be distinct and one per node.
    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Self> {
        if labels.len() != self.node_count() {
            return Err(Error::NodeCountMismatch {
                node_count: self.node_count(),
                other: labels.len(),
            });
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("node labels must be distinct"));
        }
        self.labels = labels.into();
        Ok(self)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Canonical edges in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = Dyad> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| Dyad { lo: u, hi: v })
        })
    }

    pub fn edge_set(&self) -> EdgeSet {
        EdgeSet {
            dyads: self.edges().collect(),
        }
    }

    /// Number of unordered node pairs, `C(n, 2)`.
    pub fn dyad_count(&self) -> usize {
        let n = self.node_count();
        n * n.saturating_sub(1) / 2
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, u: NodeId) -> u64 {
        self.labels[u]
    }

    pub fn label_index(&self) -> HashMap<u64, NodeId> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i))
            .collect()
    }

    /// True when every edge of `self` is also an edge of `other`.
    pub fn is_edge_subgraph_of(&self, other: &Graph) -> bool {
        self.node_count() == other.node_count() && self.edges().all(|d| other.has_edge(d.lo, d.hi))
    }

    /// Size of `N(u) ∩ N(v)` by merging the sorted lists.
    pub fn common_neighbor_count(&self, u: NodeId, v: NodeId) -> usize {
        sorted_intersection_count(self.neighbors(u), self.neighbors(v))
    }

    pub(crate) fn check_node(&self, u: NodeId) -> Result<()> {
        if u < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                index: u,
                node_count: self.node_count(),
            })
        }
    }
}

pub(crate) fn sorted_intersection_count(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}
