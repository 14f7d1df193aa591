//! Exhaustive minimum-weight perfect matching, the ground truth for tests.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::{Matching, MatchingGraph};

pub const BRUTE_FORCE_LIMIT: usize = 14;
pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub weight: u64,
    /// Lexicographically smallest minimum-weight matching.
    pub matching: Matching,
    /// Number of distinct minimum-weight perfect matchings.
    pub count_of_minima: u64,
}

struct Search<'a> {
    graph: &'a MatchingGraph,
    matched: Vec<bool>,
    stack: Vec<(usize, usize)>,
    best: Option<(u64, Vec<(usize, usize)>)>,
    count: u64,
}

impl Search<'_> {
    fn run(&mut self, weight: u64) {
        let Some(u) = self.matched.iter().position(|m| !m) else {
            match &self.best {
                Some((w, _)) if *w < weight => {}
                Some((w, _)) if *w == weight => self.count += 1,
                _ => {
                    self.best = Some((weight, self.stack.clone()));
                    self.count = 1;
                }
            }
            return;
        };
        self.matched[u] = true;
        for v in u + 1..self.graph.num_vertices() {
            if self.matched[v] {
                continue;
            }
            if let Some(id) = self.graph.edge_id(u, v) {
                self.matched[v] = true;
                self.stack.push((u, v));
                self.run(weight + self.graph.edges()[id].weight);
                self.stack.pop();
                self.matched[v] = false;
            }
        }
        self.matched[u] = false;
    }
}

/// Minimum weight, a witness and the degeneracy of the minimum.
pub fn brute_force_mwpm(graph: &MatchingGraph) -> Result<OracleResult> {
    let n = graph.num_vertices();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { vertices: n, limit: BRUTE_FORCE_LIMIT });
    }
    let mut s = Search { graph, matched: vec![false; n], stack: Vec::new(), best: None, count: 0 };
    s.run(0);
    let (weight, pairs) = s.best.ok_or(Error::NoPerfectMatching)?;
    Ok(OracleResult {
        weight,
        matching: Matching { pairs, total_base_weight: weight },
        count_of_minima: s.count,
    })
}

/// Every perfect matching exactly once, in lexicographic order of pair lists.
pub fn enumerate_perfect_matchings(graph: &MatchingGraph) -> Result<impl Iterator<Item = Matching>> {
    let n = graph.num_vertices();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { vertices: n, limit: ENUMERATION_LIMIT });
    }
    fn walk(g: &MatchingGraph, matched: &mut [bool], stack: &mut Vec<(usize, usize)>, w: u64, out: &mut Vec<Matching>) {
        let Some(u) = matched.iter().position(|m| !m) else {
            out.push(Matching { pairs: stack.clone(), total_base_weight: w });
            return;
        };
        matched[u] = true;
        for v in u + 1..g.num_vertices() {
            if matched[v] {
                continue;
            }
            if let Some(id) = g.edge_id(u, v) {
                matched[v] = true;
                stack.push((u, v));
                walk(g, matched, stack, w + g.edges()[id].weight, out);
                stack.pop();
                matched[v] = false;
            }
        }
        matched[u] = false;
    }
    let mut out = Vec::new();
    walk(graph, &mut vec![false; n], &mut Vec::new(), 0, &mut out);
    Ok(out.into_iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::MatchingEdge;
    use crate::tables::PathGraph;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Held-Karp style DP over vertex subsets.
    fn subset_dp(g: &MatchingGraph) -> Option<u64> {
        let n = g.num_vertices();
        let full = (1usize << n) - 1;
        let mut best = vec![None::<u64>; 1 << n];
        best[0] = Some(0);
        for mask in 0..=full {
            let Some(w) = best[mask] else { continue };
            let Some(u) = (0..n).find(|&i| mask & (1 << i) == 0) else { continue };
            for v in u + 1..n {
                if mask & (1 << v) != 0 {
                    continue;
                }
                if let Some(id) = g.edge_id(u, v) {
                    let next = mask | (1 << u) | (1 << v);
                    let cand = w + g.edges()[id].weight;
                    if best[next].is_none_or(|b| cand < b) {
                        best[next] = Some(cand);
                    }
                }
            }
        }
        best[full]
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> MatchingGraph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if v == u + 1 || rng.gen_bool(0.6) {
                    edges.push(MatchingEdge { u, v, weight: rng.gen_range(0..6) });
                }
            }
        }
        MatchingGraph::new(n, edges).unwrap()
    }

    #[test]
    fn single_edge() {
        let g = MatchingGraph::complete(2, |_, _| 5);
        let r = brute_force_mwpm(&g).unwrap();
        assert_eq!((r.weight, r.count_of_minima), (5, 1));
        assert_eq!(enumerate_perfect_matchings(&g).unwrap().count(), 1);
    }

    #[test]
    fn complete_four_has_three_matchings() {
        let g = MatchingGraph::complete(4, |_, _| 1);
        assert_eq!(enumerate_perfect_matchings(&g).unwrap().count(), 3);
        let r = brute_force_mwpm(&g).unwrap();
        assert_eq!(r.count_of_minima, 3);
        assert_eq!(r.matching.pairs, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn expensive_pairs_go_to_mirrors() {
        let pg = PathGraph::from_weights(vec![0, 1, 2], vec![9, 9, 9], |_, _| 1000, |_| 3).unwrap();
        let r = brute_force_mwpm(pg.graph()).unwrap();
        assert_eq!(r.matching.pairs, vec![(0, 3), (1, 4), (2, 5)]);
        assert_eq!(r.weight, 9);
    }

    #[test]
    fn refuses_large_and_unmatchable() {
        let g = MatchingGraph::complete(16, |_, _| 1);
        assert!(matches!(brute_force_mwpm(&g), Err(Error::TooLarge { .. })));
        let g = MatchingGraph::complete(14, |_, _| 1);
        assert!(enumerate_perfect_matchings(&g).is_err());
        let g = MatchingGraph::new(4, vec![MatchingEdge { u: 0, v: 1, weight: 1 }]).unwrap();
        assert!(matches!(brute_force_mwpm(&g), Err(Error::NoPerfectMatching)));
    }

    #[test]
    fn path_graphs_always_have_a_matching() {
        for k in 0..=6 {
            let pg = PathGraph::from_weights((0..k).collect(), vec![0; k], |i, j| (i + j) as u64, |_| 4).unwrap();
            assert!(enumerate_perfect_matchings(pg.graph()).unwrap().count() >= 1);
        }
    }

    proptest! {
        #[test]
        fn agrees_with_subset_dp(seed in any::<u64>(), half in 1usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_graph(&mut rng, 2 * half);
            let r = brute_force_mwpm(&g).unwrap();
            prop_assert_eq!(Some(r.weight), subset_dp(&g));
            let all: Vec<_> = enumerate_perfect_matchings(&g).unwrap().collect();
            let min = all.iter().map(|m| m.total_base_weight).min().unwrap();
            prop_assert_eq!(min, r.weight);
            prop_assert_eq!(all.iter().filter(|m| m.total_base_weight == min).count() as u64, r.count_of_minima);
            prop_assert_eq!(&all.iter().find(|m| m.total_base_weight == min).unwrap().pairs, &r.matching.pairs);
            for m in &all {
                prop_assert_eq!(Matching::from_pairs(&g, &m.pairs).unwrap(), m.clone());
            }
        }
    }
}
