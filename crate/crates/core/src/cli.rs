//! The `pmwpm` command line.

use std::ffi::OsString;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bigdet::BigMatrix;
use crate::decoder::SyndromeDecoder;
use crate::detector::{build_rotated_memory_graph, sample_errors, DetectorGraph};
use crate::error::{Error, Result};
use crate::experiment::{
    memory_csv, run_memory_experiment, run_wmax_scan, scan_csv, MemoryConfig, ScanConfig,
};
use crate::isolation::{DecodeRecord, IsolationDecoder, PerturbationScheme};
use crate::selftest::run_selftest;
use crate::tables::{DistanceTable, Recovery};
use crate::window::{
    reaction_time, reaction_time_cases, reaction_time_parallel, read_round_stream, throughput_ok,
    SlidingWindowDecoder, TimingModel, WindowConfig,
};

#[derive(Debug, Parser)]
#[command(name = "pmwpm", version, about = "Isolation-based MWPM decoding for surface codes")]
struct Cli {
    /// Master seed for sampling and perturbation schedules.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct CodeArgs {
    /// Code distance of the rotated surface code.
    #[arg(long, short = 'd', default_value_t = 3)]
    distance: usize,
    /// Syndrome rounds; defaults to the distance.
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, short = 'p', default_value_t = 1e-3)]
    p: f64,
    /// Weight scale C in ceil(-C ln p).
    #[arg(long, default_value_t = 10)]
    scale_c: u64,
    /// Detector graph in text form; overrides the code parameters.
    #[arg(long)]
    graph: Option<PathBuf>,
}

impl CodeArgs {
    fn build(&self) -> Result<DetectorGraph> {
        match &self.graph {
            Some(path) => DetectorGraph::from_text(&std::fs::read_to_string(path)?),
            None => build_rotated_memory_graph(
                self.distance,
                self.rounds.unwrap_or(self.distance),
                self.p,
                self.scale_c,
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeKind {
    Prng,
    Randomized,
    Derandomized,
}

#[derive(Debug, Args)]
struct SchemeArgs {
    #[arg(long, value_enum, default_value_t = SchemeKind::Prng)]
    scheme: SchemeKind,
    /// `W_max` of the randomized scheme.
    #[arg(long, default_value_t = 64)]
    w_max: u64,
    /// Attempt budget; unlimited for the escalating schedule unless given.
    #[arg(long)]
    attempts: Option<u64>,
    /// Composition depth of the derandomized family.
    #[arg(long, default_value_t = 1)]
    family_s: u32,
    /// Largest modulus of the derandomized family.
    #[arg(long, default_value_t = 7)]
    family_t: u64,
}

impl SchemeArgs {
    fn scheme(&self, seed: u64) -> PerturbationScheme {
        match self.scheme {
            SchemeKind::Prng => PerturbationScheme::SeededPrng { seed, max_attempts: self.attempts },
            SchemeKind::Randomized => PerturbationScheme::Randomized {
                w_max: self.w_max,
                attempts: self.attempts.unwrap_or(64),
                seed,
            },
            SchemeKind::Derandomized => PerturbationScheme::DerandomizedFamily { s: self.family_s, t: self.family_t },
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the lookup table of a detector graph.
    Precompute {
        #[command(flatten)]
        code: CodeArgs,
        /// Also write the detector graph in text form.
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
    /// Decode one set of detection events.
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Table written by `precompute`; rebuilt when absent.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Whitespace-separated detector ids.
        #[arg(long)]
        events: PathBuf,
    },
    /// Monte Carlo memory experiment.
    Experiment {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Further distances to run with the same settings.
        #[arg(long, value_delimiter = ',')]
        distances: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        /// Cross-check shots up to this path-graph size by brute force.
        #[arg(long, default_value_t = 0)]
        oracle_limit: usize,
        /// Include one record per shot in JSON output.
        #[arg(long)]
        per_shot: bool,
    },
    /// Minimal `W_max` per path-graph size, with a power-law fit.
    WmaxScan {
        #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
        distances: Vec<usize>,
        #[arg(long, short = 'p', default_value_t = 1e-3)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        scale_c: u64,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        #[arg(long, default_value_t = 30)]
        size_cap: usize,
        #[arg(long, default_value_t = 5)]
        min_samples: u64,
    },
    /// Sliding-window decoding of a round stream.
    WindowRun {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        n_com: Option<usize>,
        #[arg(long)]
        n_buf: Option<usize>,
        /// Round stream; `-` reads stdin. Without it a sampled history is decoded.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Throughput and reaction-time calculators.
    Timing {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        tau_sg: f64,
        #[arg(long, default_value_t = 0.0)]
        tau_l: f64,
        #[arg(long)]
        tw: f64,
        /// Commit region for the throughput check; defaults to d.
        #[arg(long)]
        n_com: Option<usize>,
    },
    /// Determinant and decode microbenchmarks.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: u32,
    },
    /// Oracle-equivalence suite; fails on any mismatch.
    Selftest {
        #[arg(long, default_value_t = 2000)]
        shots: u64,
    },
    /// Lookup-table utilities.
    Table {
        #[command(subcommand)]
        action: TableAction,
    },
}

#[derive(Debug, Subcommand)]
enum TableAction {
    /// Print the contents of a table file.
    Inspect { path: PathBuf },
}

/// Runs the CLI and returns the process exit status:
/// 0 on success, 1 for usage errors, 2 for runtime failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::param(e.to_string()))
            .and_then(|pool| pool.install(|| execute(&cli))),
        None => execute(&cli),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn require_json(cli: &Cli, what: &str) -> Result<()> {
    if cli.format == Format::Csv {
        return Err(Error::param(format!("{what} only has JSON output")));
    }
    Ok(())
}

fn read_events(path: &Path) -> Result<Vec<usize>> {
    std::fs::read_to_string(path)?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::format(format!("`{t}` is not a detector id"))))
        .collect()
}

#[derive(Serialize)]
struct DecodeOutput {
    #[serde(flatten)]
    record: DecodeRecord,
    path_vertices: usize,
    recovery: Recovery,
}

#[derive(Serialize)]
struct TimingOutput {
    d: usize,
    tau_sg: f64,
    tau_l: f64,
    t_w: f64,
    n_com: usize,
    throughput_ok: bool,
    eta: f64,
    eta_cases: f64,
    eta_parallel: f64,
}

#[derive(Serialize)]
struct WindowSummary {
    windows: usize,
    corrected_edges: Vec<usize>,
    logical_flip_correction: bool,
    /// Known only when the history was sampled here.
    logical_error: Option<bool>,
}

#[derive(Serialize)]
struct BenchRow {
    kind: &'static str,
    size: usize,
    seconds: f64,
}

/// Returns `Ok(false)` when a check ran but did not pass.
fn execute(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Precompute { code, graph_out } => {
            require_json(cli, "precompute")?;
            let graph = code.build()?;
            let table = crate::tables::precompute_tables(&graph)?;
            let out = cli.out.as_ref().ok_or_else(|| Error::param("precompute needs --out for the table file"))?;
            table.write_to(out)?;
            if let Some(path) = graph_out {
                std::fs::write(path, graph.to_text())?;
            }
            print!("{}", json(&serde_json::json!({
                "graph_hash": graph.hash_hex(),
                "detectors": graph.num_detectors(),
                "edges": graph.edges().len(),
                "table": out,
            }))?);
        }
        Command::Decode { code, scheme, table, events } => {
            require_json(cli, "decode")?;
            let graph = code.build()?;
            let decoder = match table {
                Some(path) => SyndromeDecoder::with_table(graph, DistanceTable::read_from(path)?)?,
                None => SyndromeDecoder::new(graph)?,
            };
            let scheme = scheme.scheme(cli.seed);
            let solver = IsolationDecoder::new(scheme.clone());
            let start = Instant::now();
            let d = decoder.decode(&read_events(events)?, &solver)?;
            let record = DecodeRecord::new(&d.outcome, &scheme, start.elapsed().as_secs_f64());
            emit(cli, &json(&DecodeOutput { record, path_vertices: d.path_vertices, recovery: d.recovery })?)?;
        }
        Command::Experiment { code, scheme, distances, shots, oracle_limit, per_shot } => {
            let mut ds = vec![code.distance];
            ds.extend(distances.iter().copied().filter(|&d| d != code.distance));
            let mut reports = Vec::new();
            for d in ds {
                let cfg = MemoryConfig {
                    distance: d,
                    rounds: code.rounds.unwrap_or(d),
                    p: code.p,
                    scale_c: code.scale_c,
                    shots: *shots,
                    master_seed: cli.seed,
                    scheme: scheme.scheme(cli.seed),
                    oracle_limit: *oracle_limit,
                    keep_shots: *per_shot,
                };
                reports.push(run_memory_experiment(&cfg)?);
            }
            let text = match cli.format {
                Format::Json => json(&reports)?,
                Format::Csv => memory_csv(&reports)?,
            };
            emit(cli, &text)?;
        }
        Command::WmaxScan { distances, p, scale_c, shots, size_cap, min_samples } => {
            let cfg = ScanConfig {
                distances: distances.clone(),
                p: *p,
                scale_c: *scale_c,
                shots_per_d: *shots,
                size_cap: *size_cap,
                master_seed: cli.seed,
                scheme_seed: cli.seed,
                min_samples: *min_samples,
            };
            let report = run_wmax_scan(&cfg)?;
            let text = match cli.format {
                Format::Json => json(&report)?,
                Format::Csv => scan_csv(&report)?,
            };
            emit(cli, &text)?;
        }
        Command::WindowRun { code, scheme, n_com, n_buf, input } => {
            require_json(cli, "window-run")?;
            let graph = code.build()?;
            let d = graph.distance();
            let cfg = WindowConfig::with_regions(d, n_com.unwrap_or(d), n_buf.unwrap_or(d))?;
            let solver = IsolationDecoder::new(scheme.scheme(cli.seed));
            let mut dec = SlidingWindowDecoder::new(&graph, cfg, &solver)?;
            let mut lines = String::new();
            let push = |lines: &mut String, recs: Vec<crate::window::WindowRecord>| -> Result<usize> {
                for r in &recs {
                    lines.push_str(&serde_json::to_string(r)?);
                    lines.push('\n');
                }
                Ok(recs.len())
            };
            let mut count = 0;
            let mut truth = None;
            match input {
                Some(path) => {
                    let reader: Box<dyn BufRead> = if path.as_os_str() == "-" {
                        Box::new(BufReader::new(std::io::stdin()))
                    } else {
                        Box::new(BufReader::new(std::fs::File::open(path)?))
                    };
                    for rec in read_round_stream(reader) {
                        count += push(&mut lines, dec.push_round(&rec?)?)?;
                    }
                }
                None => {
                    let sample = sample_errors(&graph, cli.seed);
                    truth = Some(sample.logical_flip);
                    let mut by_round = vec![Vec::new(); graph.rounds()];
                    for &id in &sample.detection_events {
                        if let Some(crate::detector::VertexKind::Detector { round, stabilizer }) = graph.vertices().get(id) {
                            by_round[*round].push(*stabilizer);
                        }
                    }
                    for (round, stabilizers) in by_round.into_iter().enumerate() {
                        count += push(&mut lines, dec.push_round(&crate::window::RoundRecord { round, stabilizers })?)?;
                    }
                }
            }
            let (tail, outcome) = dec.finish()?;
            count += push(&mut lines, tail)?;
            let summary = WindowSummary {
                windows: count,
                logical_error: truth.map(|t| t != outcome.logical_flip_correction),
                corrected_edges: outcome.corrected_edges,
                logical_flip_correction: outcome.logical_flip_correction,
            };
            lines.push_str(&serde_json::to_string(&summary)?);
            lines.push('\n');
            emit(cli, &lines)?;
        }
        Command::Timing { d, tau_sg, tau_l, tw, n_com } => {
            let tm = TimingModel::new(*tau_sg, *tau_l, *tw)?;
            let cfg = WindowConfig::with_regions(*d, n_com.unwrap_or(*d), *d)?;
            let out = TimingOutput {
                d: *d,
                tau_sg: *tau_sg,
                tau_l: *tau_l,
                t_w: *tw,
                n_com: cfg.n_com,
                throughput_ok: throughput_ok(&tm, &cfg),
                eta: reaction_time(&tm, *d)?,
                eta_cases: reaction_time_cases(&tm, *d)?,
                eta_parallel: reaction_time_parallel(&tm, *d)?,
            };
            let text = match cli.format {
                Format::Json => json(&out)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.serialize(&out).map_err(|e| Error::format(e.to_string()))?;
                    String::from_utf8(w.into_inner().map_err(|e| Error::format(e.to_string()))?)
                        .map_err(|e| Error::format(e.to_string()))?
                }
            };
            emit(cli, &text)?;
        }
        Command::Bench { sizes, reps } => {
            require_json(cli, "bench")?;
            let mut rows = Vec::new();
            for &n in sizes {
                let m = BigMatrix::new(
                    n,
                    (0..n * n).map(|i| crate::bigdet::BigInt::from(crate::seeds::derive(&[cli.seed, i as u64]) >> 1)).collect(),
                )?;
                let start = Instant::now();
                for _ in 0..*reps {
                    std::hint::black_box(m.det_berkowitz());
                }
                rows.push(BenchRow { kind: "determinant", size: n, seconds: start.elapsed().as_secs_f64() / *reps as f64 });
            }
            let graph = build_rotated_memory_graph(5, 5, 3e-3, 10)?;
            let decoder = SyndromeDecoder::new(graph)?;
            let solver = IsolationDecoder::new(PerturbationScheme::SeededPrng { seed: cli.seed, max_attempts: None });
            let mut shot = 0;
            for target in [4usize, 8, 12] {
                let events = loop {
                    let s = sample_errors(decoder.graph(), crate::seeds::derive(&[cli.seed, shot]));
                    shot += 1;
                    if 2 * s.detection_events.len() == target {
                        break s.detection_events;
                    }
                };
                let start = Instant::now();
                for _ in 0..*reps {
                    decoder.decode(&events, &solver)?;
                }
                rows.push(BenchRow { kind: "decode", size: target, seconds: start.elapsed().as_secs_f64() / *reps as f64 });
            }
            emit(cli, &json(&rows)?)?;
        }
        Command::Selftest { shots } => {
            require_json(cli, "selftest")?;
            let report = run_selftest(cli.seed, *shots)?;
            emit(cli, &json(&report)?)?;
            return Ok(report.passed());
        }
        Command::Table { action: TableAction::Inspect { path } } => {
            require_json(cli, "table inspect")?;
            emit(cli, &json(&DistanceTable::read_from(path)?.summary())?)?;
        }
    }
    Ok(true)
}
