//! Minimum-weight perfect matching by weight isolation.
//!
//! Edge weights are scaled and perturbed, `w~ = c~ w + W`, and edge `{i, j}`
//! becomes the entry `2^w~` of an antisymmetric Tutte matrix `B`. When the
//! perturbed minimum is unique, `det B = 2^(2 w*) * odd` with `w*` its
//! weight, and an edge belongs to it exactly when `2^w~ det(B_ij) / 2^(2 w*)`
//! is odd. The candidate is accepted only if it is a perfect matching of
//! modified weight `w*`.

mod schemes;

use std::cmp::Reverse;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::bigdet::ring::{Integers, Pow2, Ring, TwoAdic};
use crate::bigdet::{adjugate, characteristic_polynomial, BigMatrix, EvalMode};
use crate::error::{Error, Result};
use crate::matching::{Matching, MatchingGraph};

pub use schemes::{
    decode, decode_with, derandomized_family_size, generate_derandomized_family, w_k, DecodeOutcome,
    DecodeRecord, ExhaustiveSolver, IsolationDecoder, MatchingSolver, PerturbationScheme,
    SolveOutcome, PRNG_NAME,
};

/// Scaled and perturbed edge weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerturbedWeights {
    pub base: Vec<u64>,
    pub perturbation: Vec<u64>,
    pub w_max: u64,
    pub scale: u64,
    pub modified: Vec<u64>,
}

/// `c~ = (n / 2)(W_max - 1) + 1`, the smallest factor that keeps the
/// perturbation from reordering matchings of different base weight.
pub fn scale_factor(num_vertices: usize, w_max: u64) -> u64 {
    (num_vertices as u64 / 2) * (w_max - 1) + 1
}

impl PerturbedWeights {
    /// `perturbation[e]` must lie in `[1, w_max]`.
    pub fn new(graph: &MatchingGraph, perturbation: Vec<u64>, w_max: u64) -> Result<Self> {
        if w_max == 0 {
            return Err(Error::param("w_max must be positive"));
        }
        if perturbation.len() != graph.num_edges() {
            return Err(Error::param(format!(
                "{} perturbation values for {} edges",
                perturbation.len(),
                graph.num_edges()
            )));
        }
        if let Some(p) = perturbation.iter().position(|&w| w == 0 || w > w_max) {
            return Err(Error::param(format!("perturbation of edge {p} outside [1, {w_max}]")));
        }
        let scale = scale_factor(graph.num_vertices(), w_max);
        let base = graph.base_weights();
        let modified = base
            .iter()
            .zip(&perturbation)
            .map(|(&w, &p)| {
                w.checked_mul(scale)
                    .and_then(|x| x.checked_add(p))
                    .ok_or_else(|| Error::param("modified weight overflows u64"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PerturbedWeights { base, perturbation, w_max, scale, modified })
    }

    /// Modified weight of a matching given by its pairs.
    pub fn matching_weight(&self, graph: &MatchingGraph, m: &Matching) -> u64 {
        m.edge_ids(graph).iter().map(|&e| self.modified[e]).sum()
    }
}

/// Tutte matrix `B[i][j] = 2^w~ = -B[j][i]` for edges `i < j`.
pub fn build_b_matrix(graph: &MatchingGraph, pw: &PerturbedWeights) -> Result<BigMatrix> {
    let n = graph.num_vertices();
    let mut b = BigMatrix::zeros(n)?;
    for (e, &w) in graph.edges().iter().zip(&pw.modified) {
        let (i, j) = (e.u.min(e.v), e.u.max(e.v));
        let x = BigInt::one() << w;
        b.set(j, i, -&x);
        b.set(i, j, x);
    }
    Ok(b)
}

/// Why an extraction attempt produced no matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NotIsolated {
    /// `det B = 0`. Under [`Arithmetic::TwoAdic`] this also covers a `w*`
    /// so far above the bound that `det B` vanishes modulo `2^K`.
    ZeroDeterminant,
    /// `w*` exceeds the weight of a known perfect matching.
    AboveBound,
    CandidateNotPerfect,
    WeightMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Arithmetic {
    /// Exact integers, the literal construction.
    Exact,
    /// Integers modulo `2^K` after a vertex-potential shift; same decisions.
    #[default]
    TwoAdic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum MinorStrategy {
    /// All minors at once from the adjugate.
    #[default]
    Adjugate,
    /// One Berkowitz run per edge.
    PerEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ExtractOptions {
    pub arithmetic: Arithmetic,
    pub minors: MinorStrategy,
}

/// Rings whose elements expose a two-adic valuation.
trait Valued: Ring {
    fn zero_entry(&self) -> Self::Entry;
    fn pow2(&self, exp: u64, negative: bool) -> Self::Entry;
    /// `None` for zero (in `Z / 2^K`: divisible by `2^K`).
    fn valuation(&self, a: &Self::Elem) -> Option<u64>;
}

impl Valued for Integers {
    fn zero_entry(&self) -> BigInt {
        BigInt::default()
    }

    fn pow2(&self, exp: u64, negative: bool) -> BigInt {
        let x = BigInt::one() << exp;
        if negative { -x } else { x }
    }

    fn valuation(&self, a: &BigInt) -> Option<u64> {
        a.trailing_zeros()
    }
}

impl Valued for TwoAdic {
    fn zero_entry(&self) -> Pow2 {
        Pow2::Zero
    }

    fn pow2(&self, exp: u64, negative: bool) -> Pow2 {
        if negative { Pow2::Neg(exp) } else { Pow2::Pos(exp) }
    }

    fn valuation(&self, a: &Vec<u64>) -> Option<u64> {
        self.trailing_zeros(a)
    }
}

/// Upper bound on the minimum modified weight: the lighter of the `n / 2`
/// heaviest edges and a perfect matching found by greedy selection (or the
/// reference matching) followed by pairwise exchanges.
pub fn weight_upper_bound(graph: &MatchingGraph, modified: &[u64]) -> u64 {
    let n = graph.num_vertices();
    let mut sorted: Vec<u64> = modified.to_vec();
    sorted.sort_unstable_by_key(|&w| Reverse(w));
    let heaviest: u64 = sorted.iter().take(n / 2).sum();

    let mut order: Vec<usize> = (0..modified.len()).collect();
    order.sort_unstable_by_key(|&e| (modified[e], e));
    let mut used = vec![false; n];
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n / 2);
    for e in order {
        let edge = graph.edges()[e];
        if !used[edge.u] && !used[edge.v] {
            used[edge.u] = true;
            used[edge.v] = true;
            pairs.push((edge.u, edge.v));
        }
    }
    if pairs.len() * 2 != n {
        match graph.reference_matching() {
            Some(r) => pairs = r.iter().map(|&e| (graph.edges()[e].u, graph.edges()[e].v)).collect(),
            None => return heaviest,
        }
    }
    let w = |u: usize, v: usize| graph.edge_id(u, v).map(|e| modified[e]);
    loop {
        let mut improved = false;
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                let ((a, b), (c, d)) = (pairs[i], pairs[j]);
                let current = w(a, b).unwrap() + w(c, d).unwrap();
                for (x, y) in [((a, c), (b, d)), ((a, d), (b, c))] {
                    if let (Some(p), Some(q)) = (w(x.0, x.1), w(y.0, y.1)) {
                        if p + q < current {
                            pairs[i] = x;
                            pairs[j] = y;
                            improved = true;
                            break;
                        }
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    let local: u64 = pairs.iter().map(|&(u, v)| w(u, v).unwrap()).sum();
    heaviest.min(local)
}

/// Vertex potentials `pi >= 0` with `w~(u, v) >= pi_u + pi_v` on every edge,
/// raised greedily one vertex at a time.
fn potentials(graph: &MatchingGraph, modified: &[u64]) -> Vec<u64> {
    let n = graph.num_vertices();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (id, e) in graph.edges().iter().enumerate() {
        incident[e.u].push(id);
        incident[e.v].push(id);
    }
    let mut pi = vec![0u64; n];
    for v in 0..n {
        pi[v] = incident[v]
            .iter()
            .map(|&id| {
                let e = graph.edges()[id];
                let other = if e.u == v { e.v } else { e.u };
                modified[id] - pi[other]
            })
            .min()
            .unwrap_or(0);
    }
    pi
}

fn extract_in<R: Valued>(
    ring: &R,
    graph: &MatchingGraph,
    modified: &[u64],
    bound: u64,
    minors: MinorStrategy,
) -> std::result::Result<Vec<usize>, NotIsolated> {
    let n = graph.num_vertices();
    let mut a: Vec<R::Entry> = vec![ring.zero_entry(); n * n];
    for (e, &w) in graph.edges().iter().zip(modified) {
        let (i, j) = (e.u.min(e.v), e.u.max(e.v));
        a[i * n + j] = ring.pow2(w, false);
        a[j * n + i] = ring.pow2(w, true);
    }
    let coeffs = characteristic_polynomial(ring, n, &a, EvalMode::Sequential);
    let det_val = ring.valuation(&coeffs[n]).ok_or(NotIsolated::ZeroDeterminant)?;
    let w_star = det_val / 2;
    if w_star > bound {
        return Err(NotIsolated::AboveBound);
    }
    let minor_val: Box<dyn Fn(usize, usize) -> Option<u64>> = match minors {
        MinorStrategy::Adjugate => {
            let adj = adjugate(ring, n, &a, &coeffs);
            Box::new(move |i, j| ring.valuation(&adj[j * n + i]))
        }
        MinorStrategy::PerEdge => {
            let a = &a;
            Box::new(move |i, j| {
                let sub: Vec<R::Entry> = (0..n)
                    .filter(|&r| r != i)
                    .flat_map(|r| (0..n).filter(move |&c| c != j).map(move |c| a[r * n + c].clone()))
                    .collect();
                let p = characteristic_polynomial(ring, n - 1, &sub, EvalMode::Sequential);
                ring.valuation(&p[n - 1])
            })
        }
    };
    let candidate: Vec<usize> = graph
        .edges()
        .iter()
        .enumerate()
        .filter(|&(id, e)| {
            let (i, j) = (e.u.min(e.v), e.u.max(e.v));
            minor_val(i, j).is_some_and(|v| v + modified[id] == 2 * w_star)
        })
        .map(|(id, _)| id)
        .collect();
    Matching::from_edge_ids(graph, &candidate).map_err(|_| NotIsolated::CandidateNotPerfect)?;
    if candidate.iter().map(|&e| modified[e]).sum::<u64>() != w_star {
        return Err(NotIsolated::WeightMismatch);
    }
    Ok(candidate)
}

/// One isolation attempt: returns the minimum-weight perfect matching, or
/// [`NotIsolated`] when the perturbed minimum could not be certified.
///
/// Both arithmetic routes reach the same decision on every input; only the
/// [`NotIsolated`] reason can differ (see [`NotIsolated::ZeroDeterminant`]). The
/// two-adic route first subtracts vertex potentials `pi` from the weights,
/// which multiplies `det B` and each minor by a known power of two and leaves
/// every test above unchanged, then works modulo `2^K` with
/// `K >= 2 (U - sum pi) + 2` for the upper bound `U` on `w*`.
pub fn try_extract_mwpm(
    graph: &MatchingGraph,
    pw: &PerturbedWeights,
    options: ExtractOptions,
) -> Result<std::result::Result<Matching, NotIsolated>> {
    let n = graph.num_vertices();
    if n % 2 == 1 {
        return Err(Error::param("odd number of vertices"));
    }
    if pw.modified.len() != graph.num_edges() {
        return Err(Error::param("weights do not match the graph"));
    }
    if n == 0 {
        return Ok(Ok(Matching::empty()));
    }
    let bound = weight_upper_bound(graph, &pw.modified);
    let ids = match options.arithmetic {
        Arithmetic::Exact => extract_in(&Integers, graph, &pw.modified, bound, options.minors),
        Arithmetic::TwoAdic => {
            let pi = potentials(graph, &pw.modified);
            let shifted: Vec<u64> = graph
                .edges()
                .iter()
                .zip(&pw.modified)
                .map(|(e, &w)| w - pi[e.u] - pi[e.v])
                .collect();
            let offset: u64 = pi.iter().sum();
            let reduced = bound - offset;
            let ring = TwoAdic::with_bits(2 * reduced + 2);
            extract_in(&ring, graph, &shifted, reduced, options.minors)
        }
    };
    Ok(ids.map(|ids| Matching::from_edge_ids(graph, &ids).expect("verified perfect")))
}
