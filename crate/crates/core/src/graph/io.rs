//! SNAP edge-list reading and writing.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use log::warn;

use super::{Dyad, EdgeSet, Graph, NodeId};
use crate::error::{Error, Result};

/// Counts of input records that did not become edges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub data_lines: usize,
    pub self_loops: usize,
    pub duplicates: usize,
}

fn parse_pair(line: &str, line_no: usize) -> Result<Option<(u64, u64)>> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut tokens = trimmed.split_whitespace();
    let mut next = |what: &str| -> Result<u64> {
        let tok = tokens.next().ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("missing {what} node label"),
        })?;
        tok.parse::<u64>().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid node label {tok:?}"),
        })
    };
    let a = next("first")?;
    let b = next("second")?;
    if let Some(extra) = tokens.next() {
        return Err(Error::Parse {
            line: line_no,
            message: format!("unexpected token {extra:?}"),
        });
    }
    Ok(Some((a, b)))
}

/// Reads a SNAP edge list. Labels are assigned dense indices in order of first
/// appearance. Self-loops and repeated pairs are dropped and counted.
pub fn load_snap_edge_list_with_report<R: BufRead>(reader: R) -> Result<(Graph, LoadReport)> {
    let mut index: HashMap<u64, NodeId> = HashMap::new();
    let mut labels: Vec<u64> = Vec::new();
    let mut dyads: Vec<Dyad> = Vec::new();
    let mut report = LoadReport::default();
    let mut intern = |label: u64, labels: &mut Vec<u64>| -> NodeId {
        *index.entry(label).or_insert_with(|| {
            labels.push(label);
            labels.len() - 1
        })
    };
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let Some((a, b)) = parse_pair(&line, i + 1)? else {
            continue;
        };
        report.data_lines += 1;
        let u = intern(a, &mut labels);
        let v = intern(b, &mut labels);
        if u == v {
            report.self_loops += 1;
            continue;
        }
        dyads.push(Dyad::of(u, v));
    }
    let before = dyads.len();
    dyads.sort_unstable();
    dyads.dedup();
    report.duplicates = before - dyads.len();
    let n = labels.len();
    let graph = Graph::build(n, &dyads, labels.into())?;
    if report.self_loops > 0 {
        warn!("dropped {} self-loop line(s)", report.self_loops);
    }
    Ok((graph, report))
}

pub fn load_snap_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    load_snap_edge_list_with_report(reader).map(|(g, _)| g)
}

/// Writes the graph as a SNAP edge list using original labels, one line per
/// undirected edge in canonical order.
pub fn write_snap_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# Undirected graph")?;
    writeln!(
        out,
        "# Nodes: {} Edges: {}",
        graph.node_count(),
        graph.edge_count()
    )?;
    writeln!(out, "# FromNodeId\tToNodeId")?;
    for d in graph.edges() {
        writeln!(out, "{}\t{}", graph.label(d.lo()), graph.label(d.hi()))?;
    }
    Ok(())
}

/// Writes dyads (resolved through `graph`'s labels) in the edge-list format.
pub fn write_edge_set<W: Write>(set: &EdgeSet, graph: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# Dyads: {}", set.len())?;
    for d in set.iter() {
        writeln!(out, "{}\t{}", graph.label(d.lo()), graph.label(d.hi()))?;
    }
    Ok(())
}

/// Reads dyads in the edge-list format, mapping labels through `graph`.
pub fn read_edge_set<R: BufRead>(reader: R, graph: &Graph) -> Result<EdgeSet> {
    let index = graph.label_index();
    let mut dyads = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let Some((a, b)) = parse_pair(&line, i + 1)? else {
            continue;
        };
        let lookup = |l: u64| {
            index.get(&l).copied().ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("unknown node label {l}"),
            })
        };
        let (u, v) = (lookup(a)?, lookup(b)?);
        dyads.push(Dyad::new(u, v).map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("self-loop on label {a}"),
        })?);
    }
    Ok(dyads.into_iter().collect())
}
