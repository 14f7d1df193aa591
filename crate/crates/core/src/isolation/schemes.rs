//! Perturbation schedules and the decode loop.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_mt::Mt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{try_extract_mwpm, ExtractOptions, PerturbedWeights};
use crate::error::{Error, Result};
use crate::matching::{Matching, MatchingGraph};
use crate::oracle::brute_force_mwpm;
use crate::seeds::derive;

/// Generator behind the seeded schedule, recorded in reports.
pub const PRNG_NAME: &str = "mt19937 keyed by (seed, edge index)";

/// Initial `W_max` of the escalating schedule.
const PRNG_START: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationScheme {
    /// Fresh uniform `W` in `[1, w_max]` per attempt.
    Randomized { w_max: u64, attempts: u64, seed: u64 },
    /// Walk the deterministic family built from `w_k(e_j) = (4 n^2 + 1)^j mod k`.
    DerandomizedFamily { s: u32, t: u64 },
    /// Start at `W_max = 2`, try `W_max` fixed seed sequences, then raise `W_max` by one.
    SeededPrng { seed: u64, max_attempts: Option<u64> },
}

impl PerturbationScheme {
    fn initial_w_max(&self, n: usize) -> u64 {
        match *self {
            PerturbationScheme::Randomized { w_max, .. } => w_max,
            PerturbationScheme::DerandomizedFamily { s, t } => {
                family_bound(n, s, t).map_or(0, |b| b + 1)
            }
            PerturbationScheme::SeededPrng { .. } => PRNG_START,
        }
    }

    /// Perturbation and `W_max` of trial `index`, or `None` past the end.
    fn trial(&self, graph: &MatchingGraph, index: u64) -> Result<Option<(Vec<u64>, u64)>> {
        let n = graph.num_vertices();
        let m = graph.num_edges();
        match *self {
            PerturbationScheme::Randomized { w_max, attempts, seed } => {
                if index >= attempts {
                    return Ok(None);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(derive(&[seed, index]));
                Ok(Some(((0..m).map(|_| rng.gen_range(1..=w_max)).collect(), w_max)))
            }
            PerturbationScheme::DerandomizedFamily { s, t } => {
                let size = derandomized_family_size(s, t)?;
                if index >= size {
                    return Ok(None);
                }
                let bound = family_bound(n, s, t)
                    .ok_or_else(|| Error::param("family bound (n t)^s overflows u64"))?;
                let ks = family_digits(index, s, t);
                let w = (1..=m as u64).map(|j| compose(n, t, &ks, j) + 1).collect();
                Ok(Some((w, bound + 1)))
            }
            PerturbationScheme::SeededPrng { seed, max_attempts } => {
                if max_attempts.is_some_and(|cap| index >= cap) {
                    return Ok(None);
                }
                let (w_max, k) = prng_level(index);
                let w = (1..=m as u64)
                    .map(|j| {
                        let s = derive(&[seed, n as u64, j, k]) as u32;
                        prf(j, s, w_max)
                    })
                    .collect();
                Ok(Some((w, w_max)))
            }
        }
    }
}

/// `f(j, s)`: Mersenne twister keyed by the edge index and its 32-bit seed,
/// first draw mapped uniformly into `[1, w_max]`.
fn prf(j: u64, s: u32, w_max: u64) -> u64 {
    Mt::new_with_key([s, j as u32]).gen_range(1..=w_max)
}

/// Trial `index` of the escalating schedule as `(W_max, k)`, `k < W_max`.
fn prng_level(mut index: u64) -> (u64, u64) {
    let mut w = PRNG_START;
    while index >= w {
        index -= w;
        w += 1;
    }
    (w, index)
}

/// `w_k(e_j) = (4 n^2 + 1)^j mod k`, by modular exponentiation.
pub fn w_k(n: usize, j: u64, k: u64) -> u64 {
    let k = k as u128;
    let mut base = (4 * (n as u128) * (n as u128) + 1) % k;
    let mut e = j;
    let mut acc = 1 % k;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % k;
        }
        base = base * base % k;
        e >>= 1;
    }
    acc as u64
}

fn family_bound(n: usize, s: u32, t: u64) -> Option<u64> {
    (n as u64).checked_mul(t)?.checked_pow(s)
}

/// `(t - 1)^s`.
pub fn derandomized_family_size(s: u32, t: u64) -> Result<u64> {
    if s == 0 {
        return Err(Error::param("s must be at least 1"));
    }
    if t < 7 {
        return Err(Error::param(format!("t = {t} is below the minimum of 7")));
    }
    (t - 1).checked_pow(s).ok_or_else(|| Error::param("family size overflows u64"))
}

/// Moduli `k_1..k_s` in `2..=t` of family member `index`, `k_1` most significant.
fn family_digits(mut index: u64, s: u32, t: u64) -> Vec<u64> {
    let mut ks = vec![0; s as usize];
    for slot in ks.iter_mut().rev() {
        *slot = 2 + index % (t - 1);
        index /= t - 1;
    }
    ks
}

/// `((w_k1 o w_k2) o ...) o w_ks` at edge `j`, with `(w o w')(e) = n t w(e) + w'(e)`.
fn compose(n: usize, t: u64, ks: &[u64], j: u64) -> u64 {
    ks.iter().fold(0, |acc, &k| acc * n as u64 * t + w_k(n, j, k))
}

/// Lazily yields every member of the family for `graph`, in lexicographic
/// order of `(k_1, ..., k_s)`. Values lie in `[0, (n t)^s]`.
pub fn generate_derandomized_family(
    graph: &MatchingGraph,
    s: u32,
    t: u64,
) -> Result<impl Iterator<Item = Vec<u64>> + '_> {
    let size = derandomized_family_size(s, t)?;
    let n = graph.num_vertices();
    family_bound(n, s, t).ok_or_else(|| Error::param("family bound (n t)^s overflows u64"))?;
    let m = graph.num_edges() as u64;
    Ok((0..size).map(move |i| {
        let ks = family_digits(i, s, t);
        (1..=m).map(|j| compose(n, t, &ks, j)).collect()
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub matching: Matching,
    pub attempts_used: u64,
    pub w_max_used: u64,
}

pub type DecodeOutcome = SolveOutcome;

/// Runs trials in order until one yields a verified matching.
///
/// Trials are evaluated in batches across the rayon pool; the lowest
/// successful index wins, so the outcome does not depend on the pool size.
pub fn decode_with(
    graph: &MatchingGraph,
    scheme: &PerturbationScheme,
    options: ExtractOptions,
) -> Result<DecodeOutcome> {
    let n = graph.num_vertices();
    if n % 2 == 1 {
        return Err(Error::param("path graph has an odd number of vertices"));
    }
    if n == 0 {
        return Ok(SolveOutcome {
            matching: Matching::empty(),
            attempts_used: 0,
            w_max_used: scheme.initial_w_max(0),
        });
    }
    let batch = rayon::current_num_threads().max(1) as u64;
    let mut start = 0u64;
    loop {
        let results: Vec<Option<Result<Option<(Matching, u64)>>>> = (start..start + batch)
            .into_par_iter()
            .map(|i| {
                let (w, w_max) = match scheme.trial(graph, i) {
                    Ok(Some(t)) => t,
                    Ok(None) => return None,
                    Err(e) => return Some(Err(e)),
                };
                let pw = match PerturbedWeights::new(graph, w, w_max) {
                    Ok(pw) => pw,
                    Err(e) => return Some(Err(e)),
                };
                Some(try_extract_mwpm(graph, &pw, options).map(|r| r.ok().map(|m| (m, w_max))))
            })
            .collect();
        for (offset, r) in results.into_iter().enumerate() {
            match r {
                None => {
                    return Err(Error::BudgetExhausted { attempts: start + offset as u64, vertices: n });
                }
                Some(Err(e)) => return Err(e),
                Some(Ok(Some((matching, w_max)))) => {
                    return Ok(SolveOutcome {
                        matching,
                        attempts_used: start + offset as u64 + 1,
                        w_max_used: w_max,
                    });
                }
                Some(Ok(None)) => {}
            }
        }
        start += batch;
    }
}

pub fn decode(graph: &MatchingGraph, scheme: &PerturbationScheme) -> Result<DecodeOutcome> {
    decode_with(graph, scheme, ExtractOptions::default())
}

/// Anything that returns a minimum-weight perfect matching.
pub trait MatchingSolver: Sync {
    fn solve(&self, graph: &MatchingGraph) -> Result<SolveOutcome>;
}

#[derive(Debug, Clone)]
pub struct IsolationDecoder {
    pub scheme: PerturbationScheme,
    pub options: ExtractOptions,
}

impl IsolationDecoder {
    pub fn new(scheme: PerturbationScheme) -> Self {
        IsolationDecoder { scheme, options: ExtractOptions::default() }
    }
}

impl MatchingSolver for IsolationDecoder {
    fn solve(&self, graph: &MatchingGraph) -> Result<SolveOutcome> {
        decode_with(graph, &self.scheme, self.options)
    }
}

/// Exhaustive search; small instances only.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExhaustiveSolver;

impl MatchingSolver for ExhaustiveSolver {
    fn solve(&self, graph: &MatchingGraph) -> Result<SolveOutcome> {
        let r = brute_force_mwpm(graph)?;
        Ok(SolveOutcome { matching: r.matching, attempts_used: 0, w_max_used: 0 })
    }
}

/// JSON record of one decode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeRecord {
    pub pairs: Vec<(usize, usize)>,
    pub base_weight: u64,
    pub attempts_used: u64,
    pub w_max_used: u64,
    pub scheme: PerturbationScheme,
    pub generator: String,
    pub decode_seconds: f64,
}

impl DecodeRecord {
    pub fn new(outcome: &SolveOutcome, scheme: &PerturbationScheme, decode_seconds: f64) -> Self {
        DecodeRecord {
            pairs: outcome.matching.pairs.clone(),
            base_weight: outcome.matching.total_base_weight,
            attempts_used: outcome.attempts_used,
            w_max_used: outcome.w_max_used,
            scheme: scheme.clone(),
            generator: PRNG_NAME.to_string(),
            decode_seconds,
        }
    }
}
