//! Quick oracle-equivalence suite behind `pmwpm selftest`.

use num_bigint::{BigInt, BigUint, Sign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bigdet::BigMatrix;
use crate::decoder::SyndromeDecoder;
use crate::detector::{build_rotated_memory_graph, sample_errors};
use crate::error::Result;
use crate::isolation::{IsolationDecoder, PerturbationScheme, PerturbedWeights};
use crate::matching::{MatchingEdge, MatchingGraph};
use crate::oracle::{brute_force_mwpm, enumerate_perfect_matchings};
use crate::seeds::derive;
use crate::tables::build_path_graph;
use crate::window::{sliding_window_decode, WindowConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0)
    }
}

fn random_bigint(rng: &mut ChaCha8Rng, words: usize) -> BigInt {
    let mag = BigUint::from_slice(&(0..words).map(|_| rng.gen::<u32>()).collect::<Vec<_>>());
    BigInt::from_biguint(if rng.gen() { Sign::Plus } else { Sign::Minus }, mag)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> BigMatrix {
    BigMatrix::new(n, (0..n * n).map(|_| random_bigint(rng, 2)).collect()).expect("square")
}

fn determinants(rng: &mut ChaCha8Rng, cases: u64) -> Check {
    let failures = (0..cases)
        .filter(|_| {
            let n = rng.gen_range(1..=7);
            let m = random_matrix(rng, n);
            m.det_berkowitz() != m.det_naive().expect("small")
        })
        .count();
    Check { name: "berkowitz_vs_laplace".into(), cases, failures: failures as u64 }
}

fn characteristic(rng: &mut ChaCha8Rng, cases: u64) -> Check {
    let mut failures = 0;
    for _ in 0..cases {
        let n = rng.gen_range(1..=6);
        let m = random_matrix(rng, n);
        let p = m.characteristic_coefficients();
        for lambda in [0i64, 1, -1, 2] {
            let l = BigInt::from(lambda);
            let value = p.iter().fold(BigInt::default(), |acc, c| acc * &l + c);
            if value != m.shifted(&l).det_naive().expect("small") {
                failures += 1;
            }
        }
    }
    Check { name: "characteristic_polynomial".into(), cases, failures }
}

fn order_preservation(rng: &mut ChaCha8Rng, cases: u64) -> Check {
    let mut failures = 0;
    for _ in 0..cases {
        let n = 2 * rng.gen_range(1..=4);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if v == u + 1 || rng.gen_bool(0.7) {
                    edges.push(MatchingEdge { u, v, weight: rng.gen_range(0..4) });
                }
            }
        }
        let g = MatchingGraph::new(n, edges).expect("valid");
        let w_max = rng.gen_range(2..=2 * g.num_edges() as u64);
        let w = (0..g.num_edges()).map(|_| rng.gen_range(1..=w_max)).collect();
        let pw = PerturbedWeights::new(&g, w, w_max).expect("in range");
        let all: Vec<_> = enumerate_perfect_matchings(&g).expect("small").collect();
        let base_min = all.iter().map(|m| m.total_base_weight).min().expect("path");
        let mod_min = all.iter().map(|m| pw.matching_weight(&g, m)).min().expect("path");
        if all.iter().any(|m| pw.matching_weight(&g, m) == mod_min && m.total_base_weight != base_min) {
            failures += 1;
        }
    }
    Check { name: "perturbation_order".into(), cases, failures }
}

fn decoding(seed: u64, shots: u64) -> Result<Check> {
    let mut cases = 0;
    let mut failures = 0;
    let solver = IsolationDecoder::new(PerturbationScheme::SeededPrng { seed, max_attempts: None });
    for d in [3, 5] {
        let dec = SyndromeDecoder::new(build_rotated_memory_graph(d, d, 3e-3, 10)?)?;
        for shot in 0..shots {
            let sample = sample_errors(dec.graph(), derive(&[seed, d as u64, shot]));
            if sample.detection_events.is_empty() || 2 * sample.detection_events.len() > 10 {
                continue;
            }
            cases += 1;
            let pg = build_path_graph(dec.table(), dec.graph(), &sample.detection_events)?;
            let want = brute_force_mwpm(pg.graph())?.weight;
            match dec.decode(&sample.detection_events, &solver) {
                Ok(got) if got.outcome.matching.total_base_weight == want => {}
                _ => failures += 1,
            }
        }
    }
    Ok(Check { name: "isolation_vs_brute_force".into(), cases, failures })
}

fn windows(seed: u64, shots: u64) -> Result<Check> {
    let g = build_rotated_memory_graph(3, 6, 3e-3, 10)?;
    let whole = SyndromeDecoder::new(g.clone())?;
    let solver = IsolationDecoder::new(PerturbationScheme::SeededPrng { seed, max_attempts: None });
    let cfg = WindowConfig::with_regions(3, 6, 0)?;
    let mut failures = 0;
    for shot in 0..shots {
        let sample = sample_errors(&g, derive(&[seed, 0x77, shot]));
        let w = sliding_window_decode(&g, &sample.detection_events, cfg, &solver)?;
        let h = whole.decode(&sample.detection_events, &solver)?;
        if w.corrected_edges != h.recovery.corrected_edges {
            failures += 1;
        }
    }
    Ok(Check { name: "single_window_vs_whole_history".into(), cases: shots, failures })
}

/// Runs every check with `shots` samples where sampling applies.
pub fn run_selftest(seed: u64, shots: u64) -> Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = vec![
        determinants(&mut rng, 200),
        characteristic(&mut rng, 100),
        order_preservation(&mut rng, 200),
        decoding(seed, shots)?,
        windows(seed, shots.min(200))?,
    ];
    Ok(SelftestReport { seed, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let r = run_selftest(11, 300).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.checks.iter().all(|c| c.cases > 0));
    }
}
