use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_id, fit_power_law, stream_id, BoundPoint, PowerLawFit, DEFAULT_SCALE_C, SCHEMA_VERSION};
use crate::decoder::SyndromeDecoder;
use crate::detector::{build_rotated_memory_graph, sample_errors};
use crate::error::{Error, Result};
use crate::isolation::{IsolationDecoder, PerturbationScheme, PRNG_NAME};
use crate::seeds::shot_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub distances: Vec<usize>,
    pub p: f64,
    pub scale_c: u64,
    pub shots_per_d: u64,
    /// Largest `|V̄|` decoded; bigger instances are counted and skipped.
    pub size_cap: usize,
    pub master_seed: u64,
    /// Seed table of the escalating schedule.
    pub scheme_seed: u64,
    /// Sizes seen fewer times than this are flagged sparse and left out of the fit.
    pub min_samples: u64,
}

impl ScanConfig {
    pub fn new(distances: Vec<usize>, shots_per_d: u64, master_seed: u64) -> Self {
        ScanConfig {
            distances,
            p: 1e-3,
            scale_c: DEFAULT_SCALE_C,
            shots_per_d,
            size_cap: 30,
            master_seed,
            scheme_seed: master_seed,
            min_samples: 5,
        }
    }

    pub fn scheme(&self) -> PerturbationScheme {
        PerturbationScheme::SeededPrng { seed: self.scheme_seed, max_attempts: None }
    }
}

/// Largest per-instance minimal `W_max` at one path-graph size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WmaxScanRecord {
    pub path_vertices: usize,
    pub min_w_max: u64,
    pub shots: u64,
    pub distances: Vec<usize>,
    pub sparse: bool,
    pub scheme: PerturbationScheme,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: u32,
    pub build_id: String,
    pub generator: String,
    pub config: ScanConfig,
    pub empty_syndromes: u64,
    pub over_cap: u64,
    pub records: Vec<WmaxScanRecord>,
    pub fit: Option<PowerLawFit>,
    pub fit_error: Option<String>,
    /// `ceil(a x^b)` of the fit at even sizes up to the cap.
    pub bound_curve: Vec<BoundPoint>,
}

/// Decodes every sampled instance up to `size_cap` with the escalating
/// schedule. Since the schedule only raises `W_max`, the `W_max` at which an
/// instance first succeeds is its minimal one. Per size the maximum over
/// shots and distances is kept.
pub fn run_wmax_scan(cfg: &ScanConfig) -> Result<ScanReport> {
    if cfg.size_cap % 2 == 1 {
        return Err(Error::param(format!("size cap {} is odd", cfg.size_cap)));
    }
    if cfg.distances.is_empty() {
        return Err(Error::param("no distances to scan"));
    }
    let solver = IsolationDecoder::new(cfg.scheme());
    let mut per_size: BTreeMap<usize, (u64, u64, BTreeSet<usize>)> = BTreeMap::new();
    let mut empty_syndromes = 0;
    let mut over_cap = 0;
    for &d in &cfg.distances {
        let graph = build_rotated_memory_graph(d, d, cfg.p, cfg.scale_c)?;
        let decoder = SyndromeDecoder::new(graph)?;
        let stream = stream_id(d, d, cfg.p);
        let outcomes: Vec<Result<(usize, Option<u64>)>> = (0..cfg.shots_per_d)
            .into_par_iter()
            .map(|shot| {
                let sample = sample_errors(decoder.graph(), shot_seed(cfg.master_seed, stream, shot));
                let size = 2 * sample.detection_events.len();
                if size == 0 || size > cfg.size_cap {
                    return Ok((size, None));
                }
                let decoded = decoder.decode(&sample.detection_events, &solver)?;
                Ok((size, Some(decoded.outcome.w_max_used)))
            })
            .collect();
        for o in outcomes {
            match o? {
                (0, _) => empty_syndromes += 1,
                (_, None) => over_cap += 1,
                (size, Some(w)) => {
                    let e = per_size.entry(size).or_insert((0, 0, BTreeSet::new()));
                    e.0 = e.0.max(w);
                    e.1 += 1;
                    e.2.insert(d);
                }
            }
        }
    }

    let records: Vec<WmaxScanRecord> = per_size
        .into_iter()
        .map(|(size, (w, n, ds))| WmaxScanRecord {
            path_vertices: size,
            min_w_max: w,
            shots: n,
            distances: ds.into_iter().collect(),
            sparse: n < cfg.min_samples,
            scheme: cfg.scheme(),
            master_seed: cfg.master_seed,
        })
        .collect();
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| !r.sparse)
        .map(|r| (r.path_vertices as f64, r.min_w_max as f64))
        .collect();
    let (fit, fit_error) = match fit_power_law(&points) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let bound_curve = fit.map_or_else(Vec::new, |f| super::bound_curve(f.a, f.b, cfg.size_cap as u64));
    Ok(ScanReport {
        schema_version: SCHEMA_VERSION,
        build_id: build_id().to_string(),
        generator: PRNG_NAME.to_string(),
        config: cfg.clone(),
        empty_syndromes,
        over_cap,
        records,
        fit,
        fit_error,
        bound_curve,
    })
}
