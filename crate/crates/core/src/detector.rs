//! Detector graphs: vertices are detectors and boundary vertices, edges are
//! fault mechanisms weighted by `ceil(-C * ln(prob))`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Merged probabilities are clamped to this value so every weight stays finite and positive.
pub const PROB_CEILING: f64 = 1.0 - 1e-9;

const TEXT_MAGIC: &str = "pmwpm-detector-graph";
const TEXT_VERSION: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    Detector { round: usize, stabilizer: usize },
    SpaceBoundary,
    TimeBoundary,
}

impl VertexKind {
    pub fn is_detector(&self) -> bool {
        matches!(self, VertexKind::Detector { .. })
    }

    pub fn round(&self) -> Option<usize> {
        match self {
            VertexKind::Detector { round, .. } => Some(*round),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub prob: f64,
    pub weight: u64,
    pub flips_logical: bool,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// One raw fault mechanism before parallel mechanisms are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    pub u: usize,
    pub v: usize,
    pub prob: f64,
    pub flips_logical: bool,
}

impl Mechanism {
    pub fn new(u: usize, v: usize, prob: f64, flips_logical: bool) -> Self {
        Mechanism { u, v, prob, flips_logical }
    }
}

/// A deduplicated edge together with the indices of the raw mechanisms it absorbed.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedEdge {
    pub u: usize,
    pub v: usize,
    pub prob: f64,
    pub flips_logical: bool,
    pub sources: Vec<usize>,
}

/// Diagnostics collected while merging mechanisms.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BuildReport {
    /// Number of raw mechanisms absorbed into an existing edge.
    pub merged: usize,
    /// Endpoint pairs whose summed probability hit [`PROB_CEILING`].
    pub clamped: Vec<(usize, usize)>,
}

/// Integer edge weight `ceil(-C * ln(prob))`.
pub fn integer_weight(prob: f64, scale_c: u64) -> u64 {
    let w = (-(scale_c as f64) * prob.ln()).ceil();
    if w <= 0.0 {
        0
    } else {
        w as u64
    }
}

fn check_prob(prob: f64) -> Result<()> {
    if prob.is_finite() && prob > 0.0 && prob < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("probability {prob} is outside (0, 1)")))
    }
}

/// Merges mechanisms that flip the same endpoint pair into one edge whose
/// probability is the union bound `min(PROB_CEILING, sum p_j)`.
///
/// The output is sorted by unordered endpoint pair and does not depend on the
/// order of `raw`: probabilities inside a group are summed in sorted order.
pub fn merge_parallel_mechanisms(raw: &[Mechanism]) -> Result<(Vec<MergedEdge>, BuildReport)> {
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (idx, m) in raw.iter().enumerate() {
        check_prob(m.prob)?;
        if m.u == m.v {
            return Err(Error::Model(format!("self-loop mechanism on vertex {}", m.u)));
        }
        groups.entry((m.u.min(m.v), m.u.max(m.v))).or_default().push(idx);
    }

    let mut report = BuildReport::default();
    let mut merged = Vec::with_capacity(groups.len());
    for ((u, v), sources) in groups {
        let flips = raw[sources[0]].flips_logical;
        if sources.iter().any(|&s| raw[s].flips_logical != flips) {
            return Err(Error::Model(format!(
                "mechanisms on edge ({u}, {v}) disagree on the logical observable"
            )));
        }
        let mut probs: Vec<f64> = sources.iter().map(|&s| raw[s].prob).collect();
        probs.sort_by(f64::total_cmp);
        let mut prob: f64 = probs.iter().sum();
        if prob > PROB_CEILING {
            prob = PROB_CEILING;
            report.clamped.push((u, v));
        }
        report.merged += sources.len() - 1;
        merged.push(MergedEdge { u, v, prob, flips_logical: flips, sources });
    }
    Ok((merged, report))
}

/// Weighted simple graph of detectors and boundary vertices.
///
/// Detector vertices always precede boundary vertices, so a detector id is also
/// its row index in the shortest-path tables.
#[derive(Debug, Clone)]
pub struct DetectorGraph {
    vertices: Vec<VertexKind>,
    edges: Vec<Edge>,
    scale_c: u64,
    num_detectors: usize,
    distance: usize,
    rounds: usize,
    adjacency: Vec<Vec<(usize, usize)>>,
    hash: [u8; 32],
    report: BuildReport,
}

impl PartialEq for DetectorGraph {
    fn eq(&self, other: &Self) -> bool {
        self.hash == other.hash
            && self.vertices == other.vertices
            && self.edges == other.edges
            && self.scale_c == other.scale_c
    }
}

impl DetectorGraph {
    /// Builds a graph from raw mechanisms, merging parallel ones.
    ///
    /// `distance` and `rounds` are metadata carried into the text format; use 0
    /// for graphs that do not come from a code family.
    pub fn from_mechanisms(
        vertices: Vec<VertexKind>,
        mechanisms: &[Mechanism],
        scale_c: u64,
        distance: usize,
        rounds: usize,
    ) -> Result<Self> {
        let (merged, report) = merge_parallel_mechanisms(mechanisms)?;
        let edges = merged
            .into_iter()
            .map(|m| Edge {
                u: m.u,
                v: m.v,
                prob: m.prob,
                weight: integer_weight(m.prob, scale_c),
                flips_logical: m.flips_logical,
            })
            .collect();
        let mut graph = Self::from_edges(vertices, edges, scale_c, distance, rounds)?;
        graph.report = report;
        Ok(graph)
    }

    fn from_edges(
        vertices: Vec<VertexKind>,
        edges: Vec<Edge>,
        scale_c: u64,
        distance: usize,
        rounds: usize,
    ) -> Result<Self> {
        if scale_c == 0 {
            return Err(Error::param("scale constant C must be positive"));
        }
        let num_detectors = vertices.iter().take_while(|k| k.is_detector()).count();
        if vertices[num_detectors..].iter().any(|k| k.is_detector()) {
            return Err(Error::Model(
                "detector vertices must precede boundary vertices".into(),
            ));
        }
        let n = vertices.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for (id, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::Model(format!("edge {id} references a missing vertex")));
            }
            if e.u == e.v {
                return Err(Error::Model(format!("edge {id} is a self-loop")));
            }
            if !vertices[e.u].is_detector() && !vertices[e.v].is_detector() {
                return Err(Error::Model(format!("edge {id} joins two boundary vertices")));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::Model(format!("edge {id} duplicates an earlier edge")));
            }
            check_prob(e.prob)?;
            if e.weight != integer_weight(e.prob, scale_c) {
                return Err(Error::Model(format!(
                    "edge {id} has weight {} but ceil(-C ln p) = {}",
                    e.weight,
                    integer_weight(e.prob, scale_c)
                )));
            }
            adjacency[e.u].push((e.v, id));
            adjacency[e.v].push((e.u, id));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(_, id)| id);
        }
        let mut graph = DetectorGraph {
            vertices,
            edges,
            scale_c,
            num_detectors,
            distance,
            rounds,
            adjacency,
            hash: [0; 32],
            report: BuildReport::default(),
        };
        graph.hash = Sha256::digest(graph.to_text().as_bytes()).into();
        Ok(graph)
    }

    pub fn vertices(&self) -> &[VertexKind] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn scale_c(&self) -> u64 {
        self.scale_c
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// `(neighbour, edge id)` pairs sorted by edge id.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn is_detector(&self, v: usize) -> bool {
        v < self.num_detectors
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn report(&self) -> &BuildReport {
        &self.report
    }

    /// SHA-256 of the canonical text serialization.
    pub fn hash(&self) -> [u8; 32] {
        self.hash
    }

    pub fn hash_hex(&self) -> String {
        hex(&self.hash)
    }

    /// Versioned text serialization. Byte-identical for equal graphs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{TEXT_MAGIC} {TEXT_VERSION} d={} rounds={} C={} vertices={} edges={}",
            self.distance,
            self.rounds,
            self.scale_c,
            self.vertices.len(),
            self.edges.len()
        );
        for (id, kind) in self.vertices.iter().enumerate() {
            let _ = match kind {
                VertexKind::Detector { round, stabilizer } => {
                    writeln!(out, "v {id} detector {round} {stabilizer}")
                }
                VertexKind::SpaceBoundary => writeln!(out, "v {id} space"),
                VertexKind::TimeBoundary => writeln!(out, "v {id} time"),
            };
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "e {} {} {} {} {}",
                e.u,
                e.v,
                e.prob,
                e.weight,
                u8::from(e.flips_logical)
            );
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::format("empty graph file"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some(TEXT_MAGIC) {
            return Err(Error::format("not a detector graph file"));
        }
        if fields.next() != Some(TEXT_VERSION) {
            return Err(Error::format("unsupported detector graph version"));
        }
        let mut meta = BTreeMap::new();
        for f in fields {
            let (k, v) = f
                .split_once('=')
                .ok_or_else(|| Error::format(format!("bad header field `{f}`")))?;
            let v: u64 = v
                .parse()
                .map_err(|_| Error::format(format!("bad header value `{f}`")))?;
            meta.insert(k.to_string(), v);
        }
        let get = |k: &str| {
            meta.get(k)
                .copied()
                .ok_or_else(|| Error::format(format!("header is missing `{k}`")))
        };
        let (d, rounds, c) = (get("d")?, get("rounds")?, get("C")?);
        let (nv, ne) = (get("vertices")? as usize, get("edges")? as usize);

        let mut vertices = Vec::with_capacity(nv);
        let mut edges = Vec::with_capacity(ne);
        for (lineno, line) in lines.enumerate() {
            let bad = || Error::format(format!("line {}: `{line}`", lineno + 2));
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok.as_slice() {
                [] => continue,
                ["v", id, rest @ ..] => {
                    if id.parse::<usize>().map_err(|_| bad())? != vertices.len() {
                        return Err(bad());
                    }
                    let kind = match rest {
                        ["detector", r, s] => VertexKind::Detector {
                            round: r.parse().map_err(|_| bad())?,
                            stabilizer: s.parse().map_err(|_| bad())?,
                        },
                        ["space"] => VertexKind::SpaceBoundary,
                        ["time"] => VertexKind::TimeBoundary,
                        _ => return Err(bad()),
                    };
                    vertices.push(kind);
                }
                ["e", u, v, p, w, f] => edges.push(Edge {
                    u: u.parse().map_err(|_| bad())?,
                    v: v.parse().map_err(|_| bad())?,
                    prob: p.parse().map_err(|_| bad())?,
                    weight: w.parse().map_err(|_| bad())?,
                    flips_logical: match *f {
                        "0" => false,
                        "1" => true,
                        _ => return Err(bad()),
                    },
                }),
                _ => return Err(bad()),
            }
        }
        if vertices.len() != nv || edges.len() != ne {
            return Err(Error::format("vertex or edge count does not match the header"));
        }
        Self::from_edges(vertices, edges, c, d as usize, rounds as usize)
    }

    /// Restricts the graph to detectors with `start <= round < end`.
    ///
    /// Edges reaching into earlier rounds are dropped (the first round becomes
    /// a closed boundary); edges reaching later rounds are redirected to a new
    /// time-like boundary vertex and merged. Slicing the full round range
    /// reproduces the graph exactly.
    pub fn slice_rounds(&self, start: usize, end: usize) -> Result<GraphSlice> {
        if start >= end {
            return Err(Error::param(format!("empty round range {start}..{end}")));
        }
        let mut local = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        let mut detector_map = Vec::new();
        for (id, kind) in self.vertices[..self.num_detectors].iter().enumerate() {
            if let VertexKind::Detector { round, stabilizer } = *kind {
                if (start..end).contains(&round) {
                    local[id] = vertices.len();
                    detector_map.push(id);
                    vertices.push(VertexKind::Detector { round: round - start, stabilizer });
                }
            }
        }
        for id in self.num_detectors..self.vertices.len() {
            local[id] = vertices.len();
            vertices.push(self.vertices[id]);
        }
        let time_boundary = vertices.len();

        let mut mechanisms = Vec::new();
        let mut origin = Vec::new();
        let mut needs_time_boundary = false;
        for (id, e) in self.edges.iter().enumerate() {
            let (lu, lv) = (local[e.u], local[e.v]);
            let mapped = match (lu != usize::MAX, lv != usize::MAX) {
                (true, true) => Some((lu, lv)),
                (true, false) | (false, true) => {
                    let (inside, outside) = if lu != usize::MAX { (lu, e.v) } else { (lv, e.u) };
                    match self.vertices[outside].round() {
                        Some(r) if r >= end && vertices[inside].is_detector() => {
                            needs_time_boundary = true;
                            Some((inside, time_boundary))
                        }
                        _ => None,
                    }
                }
                (false, false) => None,
            };
            if let Some((a, b)) = mapped {
                mechanisms.push(Mechanism::new(a, b, e.prob, e.flips_logical));
                origin.push(id);
            }
        }
        if needs_time_boundary {
            vertices.push(VertexKind::TimeBoundary);
        }
        let (merged, report) = merge_parallel_mechanisms(&mechanisms)?;
        let mut edges = Vec::with_capacity(merged.len());
        let mut global_edges = Vec::with_capacity(merged.len());
        for m in merged {
            global_edges.push(m.sources.iter().map(|&s| origin[s]).min().unwrap_or(0));
            edges.push(Edge {
                u: m.u,
                v: m.v,
                prob: m.prob,
                weight: integer_weight(m.prob, self.scale_c),
                flips_logical: m.flips_logical,
            });
        }
        let mut graph = Self::from_edges(vertices, edges, self.scale_c, self.distance, end - start)?;
        graph.report = report;
        Ok(GraphSlice { graph, start_round: start, end_round: end, detector_map, global_edges })
    }
}

/// A window of a larger detector graph.
#[derive(Debug, Clone)]
pub struct GraphSlice {
    pub graph: DetectorGraph,
    pub start_round: usize,
    pub end_round: usize,
    /// Local detector id -> global detector id.
    pub detector_map: Vec<usize>,
    /// Local edge id -> representative global edge id.
    pub global_edges: Vec<usize>,
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Z-stabilizer layout of the distance-`d` rotated surface code.
///
/// Plaquette `(i, j)` sits between data qubits `(i-1..=i, j-1..=j)`; the Z
/// checks are the bulk plaquettes with `i + j` even plus the weight-two
/// plaquettes on the top and bottom edges with the same parity.
#[derive(Debug, Clone)]
pub struct RotatedLayout {
    pub distance: usize,
    pub z_checks: Vec<(usize, usize)>,
    /// For data qubit `r * d + c`, the Z checks that contain it (one or two).
    pub qubit_checks: Vec<Vec<usize>>,
}

impl RotatedLayout {
    pub fn new(distance: usize) -> Result<Self> {
        if distance < 3 || distance % 2 == 0 {
            return Err(Error::param(format!(
                "code distance must be odd and at least 3, got {distance}"
            )));
        }
        let d = distance;
        let is_z = |i: usize, j: usize| -> bool {
            let inner_col = (1..d).contains(&j);
            let inner_row = (1..d).contains(&i);
            (i + j) % 2 == 0 && inner_col && (inner_row || i == 0 || i == d)
        };
        let mut z_checks = Vec::new();
        for i in 0..=d {
            for j in 0..=d {
                if is_z(i, j) {
                    z_checks.push((i, j));
                }
            }
        }
        let mut qubit_checks = vec![Vec::new(); d * d];
        for (idx, &(i, j)) in z_checks.iter().enumerate() {
            for (r, c) in [(i.wrapping_sub(1), j.wrapping_sub(1)), (i.wrapping_sub(1), j), (i, j.wrapping_sub(1)), (i, j)] {
                if r < d && c < d {
                    qubit_checks[r * d + c].push(idx);
                }
            }
        }
        Ok(RotatedLayout { distance, z_checks, qubit_checks })
    }

    pub fn num_checks(&self) -> usize {
        self.z_checks.len()
    }
}

/// Detector graph of a rotated-surface-code memory experiment with `rounds`
/// detector layers.
///
/// Data-qubit errors give space-like edges (weight-one qubits on the left and
/// right columns go to two space boundary vertices; the left one carries the
/// logical observable), measurement errors give time-like edges between
/// consecutive layers, and hook faults give one diagonal edge per shared data
/// qubit between consecutive layers. The experiment starts from a codeword and
/// ends with a destructive measurement, so there is no time boundary.
pub fn build_rotated_memory_graph(
    distance: usize,
    rounds: usize,
    p: f64,
    scale_c: u64,
) -> Result<DetectorGraph> {
    let layout = RotatedLayout::new(distance)?;
    if rounds == 0 {
        return Err(Error::param("rounds must be at least 1"));
    }
    check_prob(p)?;
    let d = distance;
    let s = layout.num_checks();
    let det = |r: usize, c: usize| r * s + c;
    let left = rounds * s;
    let right = left + 1;

    let mut vertices = Vec::with_capacity(rounds * s + 2);
    for r in 0..rounds {
        for c in 0..s {
            vertices.push(VertexKind::Detector { round: r, stabilizer: c });
        }
    }
    vertices.push(VertexKind::SpaceBoundary);
    vertices.push(VertexKind::SpaceBoundary);

    let mut mechanisms = Vec::new();
    for r in 0..rounds {
        for (q, checks) in layout.qubit_checks.iter().enumerate() {
            match checks.as_slice() {
                [a, b] => mechanisms.push(Mechanism::new(det(r, *a), det(r, *b), p, false)),
                [a] => {
                    let col = q % d;
                    debug_assert!(col == 0 || col == d - 1);
                    let (boundary, logical) = if col == 0 { (left, true) } else { (right, false) };
                    mechanisms.push(Mechanism::new(det(r, *a), boundary, p, logical));
                }
                _ => unreachable!("every data qubit meets one or two Z checks"),
            }
        }
        if r + 1 < rounds {
            for c in 0..s {
                mechanisms.push(Mechanism::new(det(r, c), det(r + 1, c), p, false));
            }
            for checks in &layout.qubit_checks {
                if let [a, b] = checks.as_slice() {
                    mechanisms.push(Mechanism::new(det(r, *b), det(r + 1, *a), p, false));
                }
            }
        }
    }
    DetectorGraph::from_mechanisms(vertices, &mechanisms, scale_c, distance, rounds)
}

/// Edge flips drawn from the graph, with the syndrome and logical parity they imply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub flipped_edges: Vec<usize>,
    pub detection_events: Vec<usize>,
    pub logical_flip: bool,
}

impl ErrorSample {
    /// Derives detection events and the logical parity from a set of flipped edges.
    pub fn from_flipped_edges(graph: &DetectorGraph, mut flipped_edges: Vec<usize>) -> Self {
        flipped_edges.sort_unstable();
        flipped_edges.dedup();
        let mut parity = vec![false; graph.num_detectors()];
        let mut logical_flip = false;
        for &id in &flipped_edges {
            let e = &graph.edges()[id];
            for x in [e.u, e.v] {
                if x < parity.len() {
                    parity[x] ^= true;
                }
            }
            logical_flip ^= e.flips_logical;
        }
        let detection_events = parity
            .iter()
            .enumerate()
            .filter_map(|(i, &on)| on.then_some(i))
            .collect();
        ErrorSample { flipped_edges, detection_events, logical_flip }
    }
}

/// Independent edge-flip sampler. Defaults to the graph's own probabilities.
#[derive(Debug, Clone)]
pub struct EdgeSampler<'g> {
    graph: &'g DetectorGraph,
    probs: Vec<f64>,
}

impl<'g> EdgeSampler<'g> {
    pub fn new(graph: &'g DetectorGraph) -> Self {
        let probs = graph.edges().iter().map(|e| e.prob).collect();
        EdgeSampler { graph, probs }
    }

    /// Samples with explicit per-edge probabilities in `[0, 1]`.
    pub fn with_probabilities(graph: &'g DetectorGraph, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != graph.edges().len() {
            return Err(Error::param("one probability per edge is required"));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::param("sampling probabilities must lie in [0, 1]"));
        }
        Ok(EdgeSampler { graph, probs })
    }

    pub fn sample(&self, seed: u64) -> ErrorSample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flipped = self
            .probs
            .iter()
            .enumerate()
            .filter_map(|(id, &p)| (rng.gen::<f64>() < p).then_some(id))
            .collect();
        ErrorSample::from_flipped_edges(self.graph, flipped)
    }
}

/// Samples every edge independently with its own probability.
pub fn sample_errors(graph: &DetectorGraph, rng_seed: u64) -> ErrorSample {
    EdgeSampler::new(graph).sample(rng_seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight_edges(g: &DetectorGraph) -> Vec<u64> {
        g.edges().iter().map(|e| e.weight).collect()
    }

    #[test]
    fn d3_single_round_layout() {
        let g = build_rotated_memory_graph(3, 1, 0.1, 10).unwrap();
        assert_eq!(g.num_detectors(), 4);
        // Every detector reaches a space boundary directly.
        for v in 0..4 {
            assert!(g.neighbors(v).iter().any(|&(x, _)| !g.is_detector(x)), "detector {v}");
        }
        // Single mechanisms weigh ceil(-10 ln 0.1) = 24; two merged boundary
        // qubits weigh ceil(-10 ln 0.2) = 17.
        assert_eq!(integer_weight(0.1, 10), 24);
        assert_eq!(integer_weight(0.2, 10), 17);
        for e in g.edges() {
            let expect = if (e.prob - 0.1).abs() < 1e-15 { 24 } else { 17 };
            assert_eq!(e.weight, expect, "{e:?}");
        }
        assert!(weight_edges(&g).contains(&24));
    }

    #[test]
    fn detector_count_formula() {
        for (d, r) in [(3, 3), (5, 2), (7, 7)] {
            let g = build_rotated_memory_graph(d, r, 1e-3, 10).unwrap();
            assert_eq!(g.num_detectors(), r * (d * d - 1) / 2);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_rotated_memory_graph(4, 1, 0.01, 10).is_err());
        assert!(build_rotated_memory_graph(1, 1, 0.01, 10).is_err());
        assert!(build_rotated_memory_graph(3, 1, 0.0, 10).is_err());
        assert!(build_rotated_memory_graph(3, 1, 1.0, 10).is_err());
        assert!(build_rotated_memory_graph(3, 0, 0.1, 10).is_err());
    }

    #[test]
    fn weight_is_monotone_in_probability() {
        let ps = [1e-6, 1e-4, 1e-3, 0.01, 0.1, 0.3, 0.9];
        for w in ps.windows(2) {
            assert!(integer_weight(w[0], 10) >= integer_weight(w[1], 10));
        }
    }

    #[test]
    fn merge_sums_parallel_mechanisms() {
        let raw = [Mechanism::new(0, 1, 0.001, false), Mechanism::new(1, 0, 0.002, false)];
        let (merged, report) = merge_parallel_mechanisms(&raw).unwrap();
        assert_eq!(merged.len(), 1);
        assert!((merged[0].prob - 0.003).abs() < 1e-15);
        assert_eq!(report.merged, 1);

        let (single, _) = merge_parallel_mechanisms(&raw[..1]).unwrap();
        assert_eq!(single[0].prob, 0.001);
    }

    #[test]
    fn merge_clamps_and_reports() {
        let raw = [Mechanism::new(0, 2, 0.6, false), Mechanism::new(0, 2, 0.7, false)];
        let (merged, report) = merge_parallel_mechanisms(&raw).unwrap();
        assert_eq!(merged[0].prob, PROB_CEILING);
        assert_eq!(report.clamped, vec![(0, 2)]);
        assert!(integer_weight(merged[0].prob, 10) >= 1);
    }

    #[test]
    fn merge_rejects_conflicting_observables() {
        let raw = [Mechanism::new(0, 1, 0.01, true), Mechanism::new(0, 1, 0.01, false)];
        assert!(matches!(merge_parallel_mechanisms(&raw), Err(Error::Model(_))));
    }

    #[test]
    fn boundary_pairs_are_rejected() {
        let vs = vec![
            VertexKind::Detector { round: 0, stabilizer: 0 },
            VertexKind::SpaceBoundary,
            VertexKind::SpaceBoundary,
        ];
        let raw = [Mechanism::new(1, 2, 0.1, false)];
        assert!(DetectorGraph::from_mechanisms(vs, &raw, 10, 0, 1).is_err());
    }

    #[test]
    fn degree_is_bounded_across_distances() {
        let degrees: Vec<usize> = [3, 5, 7, 9]
            .iter()
            .map(|&d| build_rotated_memory_graph(d, d, 1e-3, 10).unwrap())
            .map(|g| (0..g.num_detectors()).map(|v| g.neighbors(v).len()).max().unwrap())
            .collect();
        assert!(degrees.iter().all(|&x| x <= 12), "{degrees:?}");
        assert_eq!(degrees[2], degrees[3]);
    }

    #[test]
    fn left_boundary_carries_the_observable() {
        let g = build_rotated_memory_graph(5, 2, 1e-3, 10).unwrap();
        let left = g.num_detectors();
        for e in g.edges() {
            assert_eq!(e.flips_logical, e.u == left || e.v == left);
        }
    }

    #[test]
    fn text_round_trip_is_exact() {
        let g = build_rotated_memory_graph(3, 3, 1e-3, 10).unwrap();
        let text = g.to_text();
        let back = DetectorGraph::from_text(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_text(), text);
        assert_eq!(back.hash(), g.hash());
    }

    #[test]
    fn text_rejects_inconsistent_weight() {
        let g = build_rotated_memory_graph(3, 1, 0.1, 10).unwrap();
        let text = g.to_text().replacen(" 24 ", " 25 ", 1);
        assert!(DetectorGraph::from_text(&text).is_err());
    }

    #[test]
    fn zero_probabilities_give_empty_sample() {
        let g = build_rotated_memory_graph(3, 3, 1e-3, 10).unwrap();
        let sampler = EdgeSampler::with_probabilities(&g, vec![0.0; g.edges().len()]).unwrap();
        let s = sampler.sample(99);
        assert!(s.flipped_edges.is_empty() && s.detection_events.is_empty() && !s.logical_flip);
    }

    #[test]
    fn single_boundary_flip_gives_one_event() {
        let g = build_rotated_memory_graph(3, 2, 1e-3, 10).unwrap();
        let id = g.edges().iter().position(|e| !g.is_detector(e.v)).unwrap();
        let s = ErrorSample::from_flipped_edges(&g, vec![id]);
        assert_eq!(s.detection_events.len(), 1);
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = build_rotated_memory_graph(5, 5, 0.01, 10).unwrap();
        let a = sample_errors(&g, 12345);
        let b = sample_errors(&g, 12345);
        assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
        assert_ne!(sample_errors(&g, 12346), a);
    }

    #[test]
    fn full_slice_reproduces_graph() {
        let g = build_rotated_memory_graph(3, 6, 1e-3, 10).unwrap();
        let s = g.slice_rounds(0, 6).unwrap();
        assert_eq!(s.graph, g);
        assert_eq!(s.global_edges, (0..g.edges().len()).collect::<Vec<_>>());
    }

    #[test]
    fn partial_slice_opens_the_future_boundary() {
        let g = build_rotated_memory_graph(3, 6, 1e-3, 10).unwrap();
        let s = g.slice_rounds(2, 4).unwrap();
        assert_eq!(s.graph.num_detectors(), 8);
        let tb = s.graph.num_vertices() - 1;
        assert_eq!(s.graph.vertices()[tb], VertexKind::TimeBoundary);
        // Only last-layer detectors touch the time boundary.
        for &(x, _) in s.graph.neighbors(tb) {
            assert_eq!(s.graph.vertices()[x].round(), Some(1));
        }
        // Windows of equal shape are identical graphs.
        assert_eq!(g.slice_rounds(1, 3).unwrap().graph, s.graph);
    }
}
