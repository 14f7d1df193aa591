//! Detection events in, detector-graph correction out.

use serde::{Deserialize, Serialize};

use crate::detector::DetectorGraph;
use crate::error::Result;
use crate::isolation::{MatchingSolver, SolveOutcome};
use crate::tables::{build_path_graph, matching_to_recovery, precompute_tables, DistanceTable, Recovery};

/// A detector graph together with its lookup table.
#[derive(Debug, Clone)]
pub struct SyndromeDecoder {
    graph: DetectorGraph,
    table: DistanceTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoded {
    /// `|V̄|`, twice the number of distinct detection events.
    pub path_vertices: usize,
    pub outcome: SolveOutcome,
    pub recovery: Recovery,
}

impl SyndromeDecoder {
    pub fn new(graph: DetectorGraph) -> Result<Self> {
        let table = precompute_tables(&graph)?;
        Ok(SyndromeDecoder { graph, table })
    }

    /// Pairs a graph with a table loaded elsewhere; fails if they do not belong together.
    pub fn with_table(graph: DetectorGraph, table: DistanceTable) -> Result<Self> {
        if !table.is_bound_to(&graph) {
            return Err(crate::Error::GraphMismatch);
        }
        Ok(SyndromeDecoder { graph, table })
    }

    pub fn graph(&self) -> &DetectorGraph {
        &self.graph
    }

    pub fn table(&self) -> &DistanceTable {
        &self.table
    }

    pub fn decode(&self, events: &[usize], solver: &dyn MatchingSolver) -> Result<Decoded> {
        let pg = build_path_graph(&self.table, &self.graph, events)?;
        let outcome = solver.solve(pg.graph())?;
        let recovery = matching_to_recovery(&outcome.matching, &pg, &self.table, &self.graph)?;
        Ok(Decoded { path_vertices: pg.num_vertices(), outcome, recovery })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{build_rotated_memory_graph, ErrorSample};
    use crate::isolation::{ExhaustiveSolver, IsolationDecoder, PerturbationScheme};

    #[test]
    fn single_fault_is_undone() {
        let g = build_rotated_memory_graph(3, 3, 1e-3, 10).unwrap();
        let dec = SyndromeDecoder::new(g.clone()).unwrap();
        let solver = IsolationDecoder::new(PerturbationScheme::SeededPrng { seed: 1, max_attempts: None });
        for id in 0..g.edges().len() {
            let s = ErrorSample::from_flipped_edges(&g, vec![id]);
            let d = dec.decode(&s.detection_events, &solver).unwrap();
            assert_eq!(d.recovery.logical_flip_correction, s.logical_flip, "edge {id}");
            let fixed = ErrorSample::from_flipped_edges(&g, d.recovery.corrected_edges.clone());
            assert_eq!(fixed.detection_events, s.detection_events);
        }
    }

    #[test]
    fn empty_syndrome_and_mismatched_table() {
        let g = build_rotated_memory_graph(3, 2, 1e-3, 10).unwrap();
        let dec = SyndromeDecoder::new(g).unwrap();
        let d = dec.decode(&[], &ExhaustiveSolver).unwrap();
        assert_eq!(d.path_vertices, 0);
        assert!(d.recovery.corrected_edges.is_empty());
        let other = build_rotated_memory_graph(3, 3, 1e-3, 10).unwrap();
        assert!(SyndromeDecoder::with_table(other, dec.table().clone()).is_err());
    }
}
