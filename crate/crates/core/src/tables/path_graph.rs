use serde::{Deserialize, Serialize};

use super::DistanceTable;
use crate::detector::DetectorGraph;
use crate::error::{Error, Result};
use crate::matching::{Matching, MatchingEdge, MatchingGraph};

/// The matching instance built from a set of detection events.
///
/// Vertices `0..k` are the active detectors (sorted by detector id) and
/// vertices `k..2k` their mirror boundary vertices, `k + i` mirroring `i`.
/// Edges are numbered in a fixed order: active pairs `(i, j)`, `i < j`,
/// lexicographically; then active `i` to mirror `i` by `i`; then mirror pairs
/// lexicographically. The `|A|^2` edges always admit the all-mirror matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathGraph {
    actives: Vec<usize>,
    mirrors: Vec<usize>,
    graph: MatchingGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexRole {
    Active(usize),
    Mirror(usize),
}

impl PathGraph {
    /// Assembles a path graph from per-pair and per-active boundary weights.
    pub fn from_weights(
        actives: Vec<usize>,
        mirrors: Vec<usize>,
        pair_weight: impl Fn(usize, usize) -> u64,
        boundary_weight: impl Fn(usize) -> u64,
    ) -> Result<Self> {
        let k = actives.len();
        if mirrors.len() != k {
            return Err(Error::param("one mirror per active detector is required"));
        }
        let mut edges = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in i + 1..k {
                edges.push(MatchingEdge { u: i, v: j, weight: pair_weight(i, j) });
            }
        }
        let first_mirror_edge = edges.len();
        for i in 0..k {
            edges.push(MatchingEdge { u: i, v: k + i, weight: boundary_weight(i) });
        }
        for i in 0..k {
            for j in i + 1..k {
                edges.push(MatchingEdge { u: k + i, v: k + j, weight: 0 });
            }
        }
        let graph = MatchingGraph::new(2 * k, edges)?
            .with_reference((first_mirror_edge..first_mirror_edge + k).collect())?;
        Ok(PathGraph { actives, mirrors, graph })
    }

    pub fn actives(&self) -> &[usize] {
        &self.actives
    }

    pub fn mirrors(&self) -> &[usize] {
        &self.mirrors
    }

    pub fn graph(&self) -> &MatchingGraph {
        &self.graph
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn is_empty(&self) -> bool {
        self.actives.is_empty()
    }

    pub fn role(&self, vertex: usize) -> VertexRole {
        let k = self.actives.len();
        if vertex < k {
            VertexRole::Active(vertex)
        } else {
            VertexRole::Mirror(vertex - k)
        }
    }
}

/// Reads the path graph for `events` off the lookup table.
///
/// Events are treated as a set. The table must have been built from `graph`.
pub fn build_path_graph(
    table: &DistanceTable,
    graph: &DetectorGraph,
    events: &[usize],
) -> Result<PathGraph> {
    if !table.is_bound_to(graph) {
        return Err(Error::GraphMismatch);
    }
    let mut actives = events.to_vec();
    actives.sort_unstable();
    actives.dedup();
    if let Some(&bad) = actives.iter().find(|&&v| v >= table.num_detectors()) {
        return Err(Error::NotADetector(bad));
    }
    let mirrors = actives.iter().map(|&a| table.nearest_boundary(a).boundary).collect();
    PathGraph::from_weights(
        actives.clone(),
        mirrors,
        |i, j| table.distance(actives[i], actives[j]),
        |i| table.nearest_boundary(actives[i]).distance,
    )
}

/// Detector-graph correction implied by a path-graph matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recovery {
    pub corrected_edges: Vec<usize>,
    pub logical_flip_correction: bool,
}

/// Maps matched path-graph edges to their stored detector-graph paths.
///
/// Edges used an even number of times cancel.
pub fn matching_to_recovery(
    matching: &Matching,
    path_graph: &PathGraph,
    table: &DistanceTable,
    graph: &DetectorGraph,
) -> Result<Recovery> {
    if !table.is_bound_to(graph) {
        return Err(Error::GraphMismatch);
    }
    Matching::from_pairs(path_graph.graph(), &matching.pairs)?;
    let mut parity = vec![false; graph.edges().len()];
    for &(a, b) in &matching.pairs {
        let path = match (path_graph.role(a), path_graph.role(b)) {
            (VertexRole::Active(i), VertexRole::Active(j)) => {
                table.pair_path(path_graph.actives[i], path_graph.actives[j])
            }
            (VertexRole::Active(i), VertexRole::Mirror(_)) => {
                table.boundary_path(path_graph.actives[i])
            }
            _ => &[],
        };
        for &e in path {
            parity[e as usize] ^= true;
        }
    }
    let corrected_edges: Vec<usize> = parity
        .iter()
        .enumerate()
        .filter_map(|(i, &on)| on.then_some(i))
        .collect();
    let logical_flip_correction = corrected_edges
        .iter()
        .fold(false, |acc, &e| acc ^ graph.edges()[e].flips_logical);
    Ok(Recovery { corrected_edges, logical_flip_correction })
}
