//! Sliding-window decoding over a stream of syndrome rounds.
//!
//! Window `w` covers rounds `[w n_com, w n_com + n_com + n_buf)`. Corrections
//! whose earlier endpoint lies in the first `n_com` rounds are committed; the
//! rest is discarded and decoded again by the next window. A committed edge
//! reaching into the next window toggles the detector there, which shows up
//! as an artificial detection event. The final window commits everything.

mod stream;
mod timing;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::decoder::SyndromeDecoder;
use crate::detector::{DetectorGraph, VertexKind};
use crate::error::{Error, Result};
use crate::isolation::MatchingSolver;

pub use stream::{read_round_stream, RoundRecord};
pub use timing::{reaction_time, reaction_time_cases, reaction_time_parallel, throughput_ok, TimingModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub n_com: usize,
    pub n_buf: usize,
    pub distance: usize,
}

impl WindowConfig {
    /// `n_com = n_buf = d`.
    pub fn new(distance: usize) -> Self {
        WindowConfig { n_com: distance, n_buf: distance, distance }
    }

    pub fn with_regions(distance: usize, n_com: usize, n_buf: usize) -> Result<Self> {
        if n_com == 0 {
            return Err(Error::param("commit region needs at least one round"));
        }
        Ok(WindowConfig { n_com, n_buf, distance })
    }

    fn span(&self) -> usize {
        self.n_com + self.n_buf
    }
}

/// What one window saw and committed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub index: usize,
    pub start_round: usize,
    pub end_round: usize,
    /// First round past the commit region.
    pub commit_end: usize,
    pub events: usize,
    /// Events caused by corrections committed in earlier windows.
    pub artificial_events: usize,
    pub path_vertices: usize,
    /// Global detector-graph edges committed by this window.
    pub committed_edges: Vec<usize>,
    pub logical_flip: bool,
    pub attempts_used: u64,
    pub w_max_used: u64,
    pub graph_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowOutcome {
    pub windows: Vec<WindowRecord>,
    /// Parity of all committed edges.
    pub corrected_edges: Vec<usize>,
    pub logical_flip_correction: bool,
}

/// Incremental decoder: feed rounds in order, collect windows as they close.
pub struct SlidingWindowDecoder<'a> {
    graph: &'a DetectorGraph,
    cfg: WindowConfig,
    solver: &'a dyn MatchingSolver,
    /// Window decoders keyed by the hash of their window graph.
    cache: HashMap<[u8; 32], SyndromeDecoder>,
    lookup: HashMap<(usize, usize), usize>,
    raw: Vec<bool>,
    /// Raw events with the effect of committed corrections removed.
    residual: Vec<bool>,
    committed: Vec<bool>,
    logical: bool,
    received: usize,
    next_start: usize,
    windows_done: usize,
    finished: bool,
}

impl<'a> SlidingWindowDecoder<'a> {
    pub fn new(graph: &'a DetectorGraph, cfg: WindowConfig, solver: &'a dyn MatchingSolver) -> Result<Self> {
        if cfg.n_com == 0 {
            return Err(Error::param("commit region needs at least one round"));
        }
        let lookup = graph.vertices()[..graph.num_detectors()]
            .iter()
            .enumerate()
            .filter_map(|(id, v)| match *v {
                VertexKind::Detector { round, stabilizer } => Some(((round, stabilizer), id)),
                _ => None,
            })
            .collect();
        Ok(SlidingWindowDecoder {
            graph,
            cfg,
            solver,
            cache: HashMap::new(),
            lookup,
            raw: vec![false; graph.num_detectors()],
            residual: vec![false; graph.num_detectors()],
            committed: vec![false; graph.edges().len()],
            logical: false,
            received: 0,
            next_start: 0,
            windows_done: 0,
            finished: false,
        })
    }

    /// Number of distinct window graphs built so far.
    pub fn cached_windows(&self) -> usize {
        self.cache.len()
    }

    /// Accepts one round; rounds skipped since the last call count as quiet.
    /// Returns the windows this round completed.
    pub fn push_round(&mut self, rec: &RoundRecord) -> Result<Vec<WindowRecord>> {
        if self.finished {
            return Err(Error::param("stream already finished"));
        }
        if rec.round < self.received {
            return Err(Error::format(format!("round {} arrived after round {}", rec.round, self.received - 1)));
        }
        if rec.round >= self.graph.rounds() {
            return Err(Error::format(format!("round {} beyond the {} rounds of the graph", rec.round, self.graph.rounds())));
        }
        for &s in &rec.stabilizers {
            let id = *self
                .lookup
                .get(&(rec.round, s))
                .ok_or_else(|| Error::format(format!("round {} has no stabilizer {s}", rec.round)))?;
            self.raw[id] ^= true;
            self.residual[id] ^= true;
        }
        self.received = rec.round + 1;
        let mut out = Vec::new();
        while self.next_start + self.cfg.span() < self.graph.rounds()
            && self.received >= self.next_start + self.cfg.span()
        {
            out.push(self.decode_window(self.next_start + self.cfg.span(), false)?);
        }
        Ok(out)
    }

    /// Marks the stream complete and decodes the remaining windows.
    pub fn finish(&mut self) -> Result<(Vec<WindowRecord>, WindowOutcome)> {
        if self.finished {
            return Err(Error::param("stream already finished"));
        }
        let total = self.graph.rounds();
        let mut out = Vec::new();
        while self.next_start + self.cfg.span() < total {
            out.push(self.decode_window(self.next_start + self.cfg.span(), false)?);
        }
        out.push(self.decode_window(total, true)?);
        self.finished = true;
        let corrected_edges = self.committed.iter().enumerate().filter_map(|(i, &on)| on.then_some(i)).collect();
        let outcome = WindowOutcome { windows: Vec::new(), corrected_edges, logical_flip_correction: self.logical };
        Ok((out, outcome))
    }

    fn decode_window(&mut self, end: usize, last: bool) -> Result<WindowRecord> {
        let index = self.windows_done;
        let start = self.next_start;
        let wrap = |e: Error| Error::Window { window: index, source: Box::new(e) };
        let slice = self.graph.slice_rounds(start, end).map_err(wrap)?;
        let hash = slice.graph.hash();
        if !self.cache.contains_key(&hash) {
            let dec = SyndromeDecoder::new(slice.graph.clone()).map_err(wrap)?;
            self.cache.insert(hash, dec);
        }
        let decoder = &self.cache[&hash];

        let mut events = Vec::new();
        let mut artificial = 0;
        for (local, &global) in slice.detector_map.iter().enumerate() {
            if self.residual[global] {
                events.push(local);
            }
            if self.residual[global] != self.raw[global] {
                artificial += 1;
            }
        }
        let decoded = decoder.decode(&events, self.solver).map_err(wrap)?;

        let commit_end = if last { end } else { start + self.cfg.n_com };
        let local_graph = decoder.graph();
        let mut committed_edges = Vec::new();
        let mut logical_flip = false;
        for &id in &decoded.recovery.corrected_edges {
            let e = &local_graph.edges()[id];
            let earliest = [e.u, e.v]
                .iter()
                .filter_map(|&x| local_graph.vertices()[x].round())
                .min()
                .expect("every edge touches a detector")
                + start;
            if earliest >= commit_end {
                continue;
            }
            let g = slice.global_edges[id];
            let ge = &self.graph.edges()[g];
            self.committed[g] ^= true;
            logical_flip ^= ge.flips_logical;
            for x in [ge.u, ge.v] {
                if self.graph.is_detector(x) {
                    self.residual[x] ^= true;
                }
            }
            committed_edges.push(g);
        }
        self.logical ^= logical_flip;
        self.next_start += self.cfg.n_com;
        self.windows_done += 1;
        committed_edges.sort_unstable();
        Ok(WindowRecord {
            index,
            start_round: start,
            end_round: end,
            commit_end,
            events: events.len(),
            artificial_events: artificial,
            path_vertices: decoded.path_vertices,
            committed_edges,
            logical_flip,
            attempts_used: decoded.outcome.attempts_used,
            w_max_used: decoded.outcome.w_max_used,
            graph_hash: slice.graph.hash_hex(),
        })
    }
}

/// Decodes a full history of detection events window by window.
pub fn sliding_window_decode(
    graph: &DetectorGraph,
    events: &[usize],
    cfg: WindowConfig,
    solver: &dyn MatchingSolver,
) -> Result<WindowOutcome> {
    let mut by_round: Vec<Vec<usize>> = vec![Vec::new(); graph.rounds()];
    for &id in events {
        match graph.vertices().get(id) {
            Some(&VertexKind::Detector { round, stabilizer }) => by_round[round].push(stabilizer),
            _ => return Err(Error::NotADetector(id)),
        }
    }
    let mut dec = SlidingWindowDecoder::new(graph, cfg, solver)?;
    let mut windows = Vec::new();
    for (round, stabilizers) in by_round.into_iter().enumerate() {
        windows.extend(dec.push_round(&RoundRecord { round, stabilizers })?);
    }
    let (tail, mut outcome) = dec.finish()?;
    windows.extend(tail);
    outcome.windows = windows;
    Ok(outcome)
}
