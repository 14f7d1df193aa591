//! Weighted matching instances and perfect matchings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingEdge {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
}

/// Simple undirected graph with a fixed edge order `e_1, e_2, ...`.
///
/// The edge order matters: the derandomized perturbation family is a function
/// of the edge index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingGraph {
    num_vertices: usize,
    edges: Vec<MatchingEdge>,
    /// Dense `u * n + v` lookup into `edges`.
    index: Vec<Option<usize>>,
    /// Edge ids of one perfect matching known in advance, if any.
    reference: Option<Vec<usize>>,
}

impl MatchingGraph {
    pub fn new(num_vertices: usize, edges: Vec<MatchingEdge>) -> Result<Self> {
        let n = num_vertices;
        let mut index = vec![None; n * n];
        for (id, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n || e.u == e.v {
                return Err(Error::param(format!("invalid matching edge {id}: ({}, {})", e.u, e.v)));
            }
            if index[e.u * n + e.v].is_some() {
                return Err(Error::param(format!("parallel matching edge ({}, {})", e.u, e.v)));
            }
            index[e.u * n + e.v] = Some(id);
            index[e.v * n + e.u] = Some(id);
        }
        Ok(MatchingGraph { num_vertices, edges, index, reference: None })
    }

    /// Complete graph on `n` vertices with weights from `weight(u, v)` for `u < v`.
    pub fn complete(n: usize, mut weight: impl FnMut(usize, usize) -> u64) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push(MatchingEdge { u, v, weight: weight(u, v) });
            }
        }
        Self::new(n, edges).expect("complete graph is simple")
    }

    /// Records a known perfect matching (edge ids).
    pub fn with_reference(mut self, edge_ids: Vec<usize>) -> Result<Self> {
        let m = Matching::from_edge_ids(&self, &edge_ids)?;
        debug_assert_eq!(m.pairs.len() * 2, self.num_vertices);
        self.reference = Some(edge_ids);
        Ok(self)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[MatchingEdge] {
        &self.edges
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        if u < self.num_vertices && v < self.num_vertices {
            self.index[u * self.num_vertices + v]
        } else {
            None
        }
    }

    pub fn reference_matching(&self) -> Option<&[usize]> {
        self.reference.as_deref()
    }

    pub fn base_weights(&self) -> Vec<u64> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.num_vertices == 0
    }
}

/// A perfect matching: pairs `(u, v)` with `u < v`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub total_base_weight: u64,
}

impl Matching {
    pub fn empty() -> Self {
        Matching { pairs: Vec::new(), total_base_weight: 0 }
    }

    /// Validates that `pairs` is a perfect matching of `graph` and computes its weight.
    pub fn from_pairs(graph: &MatchingGraph, pairs: &[(usize, usize)]) -> Result<Self> {
        let ids = pairs
            .iter()
            .map(|&(u, v)| {
                graph
                    .edge_id(u, v)
                    .ok_or_else(|| Error::NotPerfect(format!("({u}, {v}) is not an edge")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_edge_ids(graph, &ids)
    }

    pub fn from_edge_ids(graph: &MatchingGraph, ids: &[usize]) -> Result<Self> {
        let n = graph.num_vertices();
        let mut covered = vec![false; n];
        let mut pairs = Vec::with_capacity(ids.len());
        let mut total = 0u64;
        for &id in ids {
            let e = graph
                .edges()
                .get(id)
                .ok_or_else(|| Error::NotPerfect(format!("edge {id} does not exist")))?;
            for x in [e.u, e.v] {
                if std::mem::replace(&mut covered[x], true) {
                    return Err(Error::NotPerfect(format!("vertex {x} is matched twice")));
                }
            }
            pairs.push((e.u.min(e.v), e.u.max(e.v)));
            total += e.weight;
        }
        if let Some(x) = covered.iter().position(|c| !c) {
            return Err(Error::NotPerfect(format!("vertex {x} is unmatched")));
        }
        pairs.sort_unstable();
        Ok(Matching { pairs, total_base_weight: total })
    }

    pub fn edge_ids(&self, graph: &MatchingGraph) -> Vec<usize> {
        self.pairs
            .iter()
            .filter_map(|&(u, v)| graph.edge_id(u, v))
            .collect()
    }
}
