//! Precomputed shortest-path lookup tables and path-graph construction.
//!
//! One exhaustive Dijkstra pass over the detector graph fills a dense
//! detector-by-detector distance table, the nearest boundary of every
//! detector, and the edge lists of the corresponding shortest paths (the
//! recovery lookup). At decode time a path graph is read off the table
//! without any further search.

mod format;
mod path_graph;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::detector::DetectorGraph;
use crate::error::{Error, Result};

pub use format::{TableSummary, TABLE_MAGIC, TABLE_VERSION};
pub use path_graph::{build_path_graph, matching_to_recovery, PathGraph, Recovery, VertexRole};

const INF: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundaryEntry {
    pub boundary: usize,
    pub distance: u64,
}

/// Distance and recovery tables bound to one detector graph by its hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    num_detectors: usize,
    /// Row-major `num_detectors^2` distances.
    pair_dist: Vec<u64>,
    nearest: Vec<BoundaryEntry>,
    /// Path `i` occupies `path_edges[offsets[i]..offsets[i + 1]]`. Pair paths
    /// for `u < v` come first in upper-triangular order, then one
    /// nearest-boundary path per detector.
    path_offsets: Vec<u64>,
    path_edges: Vec<u32>,
    graph_hash: [u8; 32],
}

impl DistanceTable {
    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn graph_hash(&self) -> [u8; 32] {
        self.graph_hash
    }

    pub fn distance(&self, u: usize, v: usize) -> u64 {
        self.pair_dist[u * self.num_detectors + v]
    }

    pub fn nearest_boundary(&self, u: usize) -> BoundaryEntry {
        self.nearest[u]
    }

    /// Edge ids of the stored shortest path between detectors `u` and `v`,
    /// walked from `min(u, v)` to `max(u, v)`.
    pub fn pair_path(&self, u: usize, v: usize) -> &[u32] {
        if u == v {
            return &[];
        }
        self.path(self.triangle_index(u.min(v), u.max(v)))
    }

    /// Edge ids of the stored path from `u` to its nearest boundary vertex.
    pub fn boundary_path(&self, u: usize) -> &[u32] {
        let d = self.num_detectors;
        self.path(d * (d - 1) / 2 + u)
    }

    fn path(&self, i: usize) -> &[u32] {
        &self.path_edges[self.path_offsets[i] as usize..self.path_offsets[i + 1] as usize]
    }

    fn triangle_index(&self, u: usize, v: usize) -> usize {
        let d = self.num_detectors;
        u * (2 * d - u - 1) / 2 + (v - u - 1)
    }

    pub fn is_bound_to(&self, graph: &DetectorGraph) -> bool {
        self.graph_hash == graph.hash()
    }
}

/// Single-source distances. Boundary vertices are endpoints only: they are
/// never relaxed through unless they are the source.
fn dijkstra(graph: &DetectorGraph, source: usize) -> Vec<u64> {
    let mut dist = vec![INF; graph.num_vertices()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0;
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if d > dist[x] || (x != source && !graph.is_detector(x)) {
            continue;
        }
        for &(y, id) in graph.neighbors(x) {
            let nd = d + graph.edges()[id].weight;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(Reverse((nd, y)));
            }
        }
    }
    dist
}

/// Lexicographically smallest edge-id sequence among the shortest `s -> t` paths.
fn lex_smallest_path(graph: &DetectorGraph, rows: &[Vec<u64>], s: usize, t: usize) -> Vec<u32> {
    let mut path = Vec::new();
    let mut cur = s;
    while cur != t {
        let remaining = rows[cur][t];
        let (next, id) = graph
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&(y, id)| {
                (y == t || graph.is_detector(y))
                    && rows[y][t] != INF
                    && graph.edges()[id].weight + rows[y][t] == remaining
            })
            .expect("a shortest path continues from every vertex on it");
        path.push(id as u32);
        cur = next;
    }
    path
}

/// Runs Dijkstra from every vertex and fills the lookup tables.
///
/// Ties between equally distant boundaries go to the smaller vertex id; ties
/// between equal-length paths go to the lexicographically smallest edge-id
/// sequence. The result does not depend on the rayon pool size.
pub fn precompute_tables(graph: &DetectorGraph) -> Result<DistanceTable> {
    let d = graph.num_detectors();
    let n = graph.num_vertices();
    let rows: Vec<Vec<u64>> = (0..n).into_par_iter().map(|s| dijkstra(graph, s)).collect();

    let mut nearest = Vec::with_capacity(d);
    for (u, row) in rows.iter().enumerate().take(d) {
        let best = (d..n)
            .filter(|&b| row[b] != INF)
            .min_by_key(|&b| (row[b], b))
            .ok_or(Error::NoBoundaryPath { vertex: u })?;
        nearest.push(BoundaryEntry { boundary: best, distance: row[best] });
    }
    let mut pair_dist = Vec::with_capacity(d * d);
    for (u, row) in rows.iter().enumerate().take(d) {
        for (v, &dist) in row.iter().enumerate().take(d) {
            if dist == INF {
                return Err(Error::Disconnected { a: u, b: v });
            }
            pair_dist.push(dist);
        }
    }

    let pair_paths: Vec<Vec<Vec<u32>>> = (0..d)
        .into_par_iter()
        .map(|u| (u + 1..d).map(|v| lex_smallest_path(graph, &rows, u, v)).collect())
        .collect();
    let boundary_paths: Vec<Vec<u32>> = (0..d)
        .into_par_iter()
        .map(|u| lex_smallest_path(graph, &rows, u, nearest[u].boundary))
        .collect();

    let mut path_offsets = vec![0u64];
    let mut path_edges = Vec::new();
    for p in pair_paths.iter().flatten().chain(boundary_paths.iter()) {
        path_edges.extend_from_slice(p);
        path_offsets.push(path_edges.len() as u64);
    }
    Ok(DistanceTable {
        num_detectors: d,
        pair_dist,
        nearest,
        path_offsets,
        path_edges,
        graph_hash: graph.hash(),
    })
}
