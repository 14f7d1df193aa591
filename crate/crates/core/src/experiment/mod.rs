//! Monte Carlo memory experiments and the `W_max` scan.

mod fit;
mod output;
mod scan;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::SyndromeDecoder;
use crate::detector::{build_rotated_memory_graph, sample_errors};
use crate::error::{Error, Result};
use crate::isolation::{IsolationDecoder, MatchingSolver, PerturbationScheme, PRNG_NAME};
use crate::oracle::brute_force_mwpm;
use crate::seeds::{derive, shot_seed};
use crate::tables::build_path_graph;

pub use fit::{bound_curve, fit_power_law, BoundPoint, PowerLawFit};
pub use output::{memory_csv, parse_memory_csv, parse_scan_csv, scan_csv, MemoryCsvRow, ScanCsvRow};
pub use scan::{run_wmax_scan, ScanConfig, ScanReport, WmaxScanRecord};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_SCALE_C: u64 = 10;

/// Two-sided 95% normal quantile.
pub const WILSON_Z95: f64 = 1.959_963_984_540_054;

/// Git revision baked in at build time, or the package version.
pub fn build_id() -> &'static str {
    option_env!("PMWPM_BUILD_ID").unwrap_or(concat!("v", env!("CARGO_PKG_VERSION")))
}

/// Sample stream of one code size and noise level under a master seed.
/// Memory runs and scans with equal parameters draw the same shots.
pub(crate) fn stream_id(distance: usize, rounds: usize, p: f64) -> u64 {
    derive(&[distance as u64, rounds as u64, p.to_bits()])
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let phat = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryConfig {
    pub distance: usize,
    pub rounds: usize,
    pub p: f64,
    pub scale_c: u64,
    pub shots: u64,
    pub master_seed: u64,
    pub scheme: PerturbationScheme,
    /// Cross-check every shot with `|V̄|` up to this size against brute force; 0 disables.
    pub oracle_limit: usize,
    pub keep_shots: bool,
}

impl MemoryConfig {
    /// `rounds = d`, `C = 10`, seeded escalation, no oracle.
    pub fn new(distance: usize, p: f64, shots: u64, master_seed: u64) -> Self {
        MemoryConfig {
            distance,
            rounds: distance,
            p,
            scale_c: DEFAULT_SCALE_C,
            shots,
            master_seed,
            scheme: PerturbationScheme::SeededPrng { seed: master_seed, max_attempts: None },
            oracle_limit: 0,
            keep_shots: false,
        }
    }

    fn stream(&self) -> u64 {
        stream_id(self.distance, self.rounds, self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub shot: u64,
    pub path_vertices: usize,
    pub attempts_used: u64,
    pub w_max_used: u64,
    pub matching_weight: u64,
    pub logical_error: bool,
    pub oracle_weight: Option<u64>,
    /// Decode error message; such shots count as logical errors.
    pub failure: Option<String>,
}

/// Decoder behaviour at one path-graph size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeStat {
    pub path_vertices: usize,
    pub shots: u64,
    pub max_w_max: u64,
    pub max_attempts: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryReport {
    pub schema_version: u32,
    pub build_id: String,
    pub generator: String,
    pub scheme: PerturbationScheme,
    pub graph_hash: String,
    pub distance: usize,
    pub rounds: usize,
    pub p: f64,
    pub scale_c: u64,
    pub shots: u64,
    pub master_seed: u64,
    pub logical_errors: u64,
    pub decode_failures: u64,
    pub logical_error_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub oracle_checked: u64,
    pub oracle_mismatches: u64,
    pub wmax_stats: Vec<SizeStat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_shot: Option<Vec<ShotRecord>>,
}

fn run_shot(
    decoder: &SyndromeDecoder,
    solver: &dyn MatchingSolver,
    cfg: &MemoryConfig,
    shot: u64,
) -> ShotRecord {
    let sample = sample_errors(decoder.graph(), shot_seed(cfg.master_seed, cfg.stream(), shot));
    let mut rec = ShotRecord {
        shot,
        path_vertices: 2 * sample.detection_events.len(),
        attempts_used: 0,
        w_max_used: 0,
        matching_weight: 0,
        logical_error: true,
        oracle_weight: None,
        failure: None,
    };
    match decoder.decode(&sample.detection_events, solver) {
        Ok(d) => {
            rec.attempts_used = d.outcome.attempts_used;
            rec.w_max_used = d.outcome.w_max_used;
            rec.matching_weight = d.outcome.matching.total_base_weight;
            rec.logical_error = sample.logical_flip != d.recovery.logical_flip_correction;
        }
        Err(e) => rec.failure = Some(e.to_string()),
    }
    if rec.path_vertices <= cfg.oracle_limit {
        rec.oracle_weight = build_path_graph(decoder.table(), decoder.graph(), &sample.detection_events)
            .and_then(|pg| brute_force_mwpm(pg.graph()))
            .map(|r| r.weight)
            .ok();
    }
    rec
}

/// Runs the memory experiment with the configured perturbation scheme.
pub fn run_memory_experiment(cfg: &MemoryConfig) -> Result<MemoryReport> {
    let solver = IsolationDecoder::new(cfg.scheme.clone());
    run_memory_experiment_with(cfg, &solver)
}

/// Runs the memory experiment with any matching solver.
///
/// Shots are sampled from per-shot seeds and collected in shot order, so
/// the report does not depend on the worker count.
pub fn run_memory_experiment_with(cfg: &MemoryConfig, solver: &dyn MatchingSolver) -> Result<MemoryReport> {
    if !(cfg.p > 0.0 && cfg.p < 0.5) {
        return Err(Error::param(format!("p = {} is outside (0, 0.5)", cfg.p)));
    }
    let graph = build_rotated_memory_graph(cfg.distance, cfg.rounds, cfg.p, cfg.scale_c)?;
    let decoder = SyndromeDecoder::new(graph)?;
    let records: Vec<ShotRecord> =
        (0..cfg.shots).into_par_iter().map(|s| run_shot(&decoder, solver, cfg, s)).collect();

    let logical_errors = records.iter().filter(|r| r.logical_error).count() as u64;
    let decode_failures = records.iter().filter(|r| r.failure.is_some()).count() as u64;
    let checked: Vec<&ShotRecord> = records.iter().filter(|r| r.oracle_weight.is_some()).collect();
    let oracle_mismatches = checked
        .iter()
        .filter(|r| r.failure.is_some() || r.oracle_weight != Some(r.matching_weight))
        .count() as u64;

    let mut sizes: BTreeMap<usize, SizeStat> = BTreeMap::new();
    for r in records.iter().filter(|r| r.failure.is_none()) {
        let s = sizes.entry(r.path_vertices).or_insert(SizeStat {
            path_vertices: r.path_vertices,
            shots: 0,
            max_w_max: 0,
            max_attempts: 0,
        });
        s.shots += 1;
        s.max_w_max = s.max_w_max.max(r.w_max_used);
        s.max_attempts = s.max_attempts.max(r.attempts_used);
    }

    let (wilson_low, wilson_high) = wilson_interval(logical_errors, cfg.shots, WILSON_Z95);
    Ok(MemoryReport {
        schema_version: SCHEMA_VERSION,
        build_id: build_id().to_string(),
        generator: PRNG_NAME.to_string(),
        scheme: cfg.scheme.clone(),
        graph_hash: decoder.graph().hash_hex(),
        distance: cfg.distance,
        rounds: cfg.rounds,
        p: cfg.p,
        scale_c: cfg.scale_c,
        shots: cfg.shots,
        master_seed: cfg.master_seed,
        logical_errors,
        decode_failures,
        logical_error_rate: if cfg.shots == 0 { 0.0 } else { logical_errors as f64 / cfg.shots as f64 },
        wilson_low,
        wilson_high,
        oracle_checked: checked.len() as u64,
        oracle_mismatches,
        wmax_stats: sizes.into_values().collect(),
        per_shot: cfg.keep_shots.then_some(records),
    })
}
