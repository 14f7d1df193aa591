//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; exits nonzero if any fails.

use std::process::Command;

use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Signed, Zero};
use pmwpm::bigdet::BigMatrix;
use pmwpm::decoder::SyndromeDecoder;
use pmwpm::detector::{build_rotated_memory_graph, sample_errors};
use pmwpm::experiment::{run_memory_experiment, run_wmax_scan, MemoryConfig, ScanConfig};
use pmwpm::isolation::{
    derandomized_family_size, generate_derandomized_family, try_extract_mwpm, w_k, ExhaustiveSolver,
    ExtractOptions, IsolationDecoder, PerturbationScheme, PerturbedWeights,
};
use pmwpm::matching::{Matching, MatchingEdge, MatchingGraph};
use pmwpm::oracle::{brute_force_mwpm, enumerate_perfect_matchings};
use pmwpm::seeds::derive;
use pmwpm::tables::{build_path_graph, PathGraph};
use pmwpm::window::{
    reaction_time, reaction_time_cases, sliding_window_decode, throughput_ok, TimingModel, WindowConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

/// Minimum perfect-matching weight by DP over vertex subsets.
fn subset_dp(g: &MatchingGraph) -> Option<u64> {
    let n = g.num_vertices();
    let full = (1usize << n) - 1;
    let mut best = vec![None::<u64>; 1 << n];
    best[0] = Some(0);
    for mask in 0..full {
        let Some(w) = best[mask] else { continue };
        let u = (0..n).find(|&i| mask & (1 << i) == 0).unwrap();
        for e in g.edges() {
            let v = if e.u == u { e.v } else if e.v == u { e.u } else { continue };
            if mask & (1 << v) == 0 {
                let next = mask | (1 << u) | (1 << v);
                let cand = w + e.weight;
                if best[next].is_none_or(|b| cand < b) {
                    best[next] = Some(cand);
                }
            }
        }
    }
    best[full]
}

/// Fraction-free Gaussian elimination.
fn bareiss(n: usize, entries: &[BigInt]) -> BigInt {
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| entries[i * n..(i + 1) * n].to_vec()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Pfaffian by expansion along the first row.
fn pfaffian(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for j in 1..n {
        let rest: Vec<usize> = (1..n).filter(|&x| x != j).collect();
        let sub: Vec<Vec<BigInt>> = rest.iter().map(|&r| rest.iter().map(|&c| a[r][c].clone()).collect()).collect();
        let term = &a[0][j] * pfaffian(&sub);
        if j % 2 == 1 { total += term } else { total -= term }
    }
    total
}

fn c1_oracle_soundness() -> Outcome {
    let solver = IsolationDecoder::new(PerturbationScheme::SeededPrng { seed: 1, max_attempts: None });
    let mut checked = 0u64;
    let mut mismatches = 0u64;
    for d in [3usize, 5] {
        let dec = SyndromeDecoder::new(build_rotated_memory_graph(d, d, 1e-3, 10).unwrap()).unwrap();
        for shot in 0..10_000u64 {
            let sample = sample_errors(dec.graph(), derive(&[0xACCE, d as u64, shot]));
            let size = 2 * sample.detection_events.len();
            if size > 10 {
                continue;
            }
            checked += 1;
            let pg = build_path_graph(dec.table(), dec.graph(), &sample.detection_events).unwrap();
            let want = subset_dp(pg.graph()).unwrap();
            let brute = brute_force_mwpm(pg.graph()).unwrap().weight;
            let got = dec.decode(&sample.detection_events, &solver).map(|r| r.outcome.matching.total_base_weight);
            if got.ok() != Some(want) || brute != want {
                mismatches += 1;
            }
        }
    }
    (mismatches == 0, format!("{checked} path graphs with |V| <= 10 at d = 3, 5; {mismatches} weight mismatches (tolerance 0)"))
}

fn c2_determinants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let bound = BigInt::one() << 64;
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8);
        let entries: Vec<BigInt> = (0..n * n).map(|_| rng.gen_bigint_range(&-&bound, &(&bound + 1))).collect();
        let m = BigMatrix::new(n, entries.clone()).unwrap();
        let b = m.det_berkowitz();
        if b != m.det_naive().unwrap() || b != bareiss(n, &entries) {
            bad += 1;
        }
    }
    let mut not_square = 0;
    for _ in 0..100 {
        let n = 2 * rng.gen_range(1..=4);
        let mut a = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_bigint_range(&-&bound, &(&bound + 1));
                a[j][i] = -&v;
                a[i][j] = v;
            }
        }
        let det = BigMatrix::from_rows(&a).unwrap().det_berkowitz();
        let pf = pfaffian(&a);
        let root = det.sqrt();
        if det.is_negative() || &root * &root != det || &pf * &pf != det {
            not_square += 1;
        }
    }
    (
        bad == 0 && not_square == 0,
        format!("1000 matrices n <= 8, |a| <= 2^64: {bad} disagreements; 100 antisymmetric: {not_square} non-squares (exact)"),
    )
}

fn c3_characteristic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let entries: Vec<BigInt> = (0..n * n).map(|_| rng.gen_bigint(40)).collect();
        let m = BigMatrix::new(n, entries).unwrap();
        let p = m.characteristic_coefficients();
        for lambda in [0i64, 1, -1, 2] {
            let l = BigInt::from(lambda);
            let value = p.iter().fold(BigInt::zero(), |acc, c| acc * &l + c);
            let shifted = m.shifted(&l);
            if value != shifted.det_naive().unwrap() || value != bareiss(n, shifted.entries()) {
                bad += 1;
            }
        }
        if p[n] != m.det_naive().unwrap() {
            bad += 1;
        }
    }
    (bad == 0, format!("100 matrices n <= 6 at lambda in {{0, 1, -1, 2}}: {bad} disagreements (exact)"))
}

fn c4_isolation_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let trials = 1000u64;
    let mut failed = 0u64;
    let mut not_unique = 0u64;
    for _ in 0..trials {
        // Pair weight twice the boundary weight: every perfect matching ties.
        let b = rng.gen_range(1..=20);
        let pg = PathGraph::from_weights(vec![0, 1, 2], vec![9; 3], |_, _| 2 * b, |_| b).unwrap();
        let g = pg.graph();
        let w_max = 2 * g.num_edges() as u64;
        let w: Vec<u64> = (0..g.num_edges()).map(|_| rng.gen_range(1..=w_max)).collect();
        let pw = PerturbedWeights::new(g, w.clone(), w_max).unwrap();
        if try_extract_mwpm(g, &pw, ExtractOptions::default()).unwrap().is_err() {
            failed += 1;
        }
        let weights: Vec<u64> = enumerate_perfect_matchings(g)
            .unwrap()
            .map(|m| m.edge_ids(g).iter().map(|&e| w[e]).sum())
            .collect();
        let min = *weights.iter().min().unwrap();
        if weights.iter().filter(|&&x| x == min).count() > 1 {
            not_unique += 1;
        }
    }
    let limit = 0.5 + 3.0 * (0.25 / trials as f64).sqrt();
    let rate = failed as f64 / trials as f64;
    let tie_rate = not_unique as f64 / trials as f64;
    (
        rate <= limit && tie_rate <= limit,
        format!("|V| = 6, W_max = 2|E| = 18: NotIsolated rate {rate:.3}, tied-minimum rate {tie_rate:.3}, limit {limit:.3}"),
    )
}

fn c5_wmax_scaling() -> Outcome {
    let r = run_wmax_scan(&ScanConfig::new(vec![3, 5, 7], 10_000, 5)).unwrap();
    let Some(fit) = r.fit else {
        return (false, format!("no fit: {:?}", r.fit_error));
    };
    let over: Vec<String> = r
        .records
        .iter()
        .filter(|x| x.path_vertices <= 20)
        .filter(|x| x.min_w_max > (0.62 * (x.path_vertices as f64).powf(0.8)).ceil() as u64 + 2)
        .map(|x| format!("|V|={}: {}", x.path_vertices, x.min_w_max))
        .collect();
    let points: Vec<String> = r.records.iter().map(|x| format!("{}:{}", x.path_vertices, x.min_w_max)).collect();
    (
        fit.b < 1.0 && over.is_empty(),
        format!(
            "d = 3, 5, 7 x 10^4 shots: fit a = {:.3}, b = {:.3} (need b < 1); points {}; above ceil(0.62 x^0.8) + 2: {:?}",
            fit.a,
            fit.b,
            points.join(" "),
            over
        ),
    )
}

fn c6_order_preservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    for i in 0..1000 {
        let g = if i % 2 == 0 {
            let k = rng.gen_range(1..=4);
            let ws: Vec<u64> = (0..k * k).map(|_| rng.gen_range(0..5)).collect();
            PathGraph::from_weights((0..k).collect(), vec![0; k], |a, b| ws[a * k + b], |a| ws[a * k + a])
                .unwrap()
                .graph()
                .clone()
        } else {
            let n = 2 * rng.gen_range(1..=4);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if v == u + 1 || rng.gen_bool(0.6) {
                        edges.push(MatchingEdge { u, v, weight: rng.gen_range(0..4) });
                    }
                }
            }
            MatchingGraph::new(n, edges).unwrap()
        };
        let n = g.num_vertices() as u64;
        let w_max = rng.gen_range(1..=40);
        let w: Vec<u64> = (0..g.num_edges()).map(|_| rng.gen_range(1..=w_max)).collect();
        let pw = PerturbedWeights::new(&g, w.clone(), w_max).unwrap();
        let scale = (n / 2) * (w_max - 1) + 1;
        let expect: Vec<u64> = g.edges().iter().zip(&w).map(|(e, &x)| scale * e.weight + x).collect();
        let all: Vec<Matching> = enumerate_perfect_matchings(&g).unwrap().collect();
        let modw = |m: &Matching| m.edge_ids(&g).iter().map(|&e| expect[e]).sum::<u64>();
        let base_min = all.iter().map(|m| m.total_base_weight).min().unwrap();
        let mod_min = all.iter().map(modw).min().unwrap();
        if pw.modified != expect || all.iter().any(|m| modw(m) == mod_min && m.total_base_weight != base_min) {
            violations += 1;
        }
    }
    (violations == 0, format!("1000 instances |V| <= 8, exhaustive: {violations} violations (tolerance 0)"))
}

fn c7_derandomized_structure() -> Outcome {
    let mut problems = Vec::new();
    for k_act in [2usize, 3] {
        let pg = PathGraph::from_weights((0..k_act).collect(), vec![0; k_act], |_, _| 1, |_| 1).unwrap();
        let g = pg.graph();
        let n = g.num_vertices() as u64;
        for s in [1u32, 2] {
            for t in [7u64, 11] {
                let size = (t - 1).pow(s);
                if derandomized_family_size(s, t).unwrap() != size {
                    problems.push(format!("size n={n} s={s} t={t}"));
                }
                let bound = (n * t).pow(s);
                let members: Vec<Vec<u64>> = generate_derandomized_family(g, s, t).unwrap().collect();
                if members.len() as u64 != size {
                    problems.push(format!("count n={n} s={s} t={t}"));
                }
                if members.iter().flatten().any(|&x| x > bound) {
                    problems.push(format!("range n={n} s={s} t={t}"));
                }
                for k in 2..=t {
                    for j in 1..=g.num_edges() as u64 {
                        let naive = (0..j).fold(1 % k, |acc, _| acc * ((4 * n * n + 1) % k) % k);
                        let v = w_k(n as usize, j, k);
                        if v >= k || v != naive {
                            problems.push(format!("w_k n={n} j={j} k={k}"));
                        }
                    }
                }
            }
        }
    }
    (problems.is_empty(), format!("|V| in {{4, 6}}, s in {{1, 2}}, t in {{7, 11}}: {} structural violations {:?}", problems.len(), problems))
}

fn c8_timing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    for _ in 0..10_000 {
        let d = rng.gen_range(1..=15);
        let tau_sg: f64 = rng.gen_range(0.01..10.0);
        let span = d as f64 * tau_sg;
        let t_w = rng.gen_range(1e-6..1.0) * span;
        // First case: no latency.
        let first = TimingModel::new(tau_sg, 0.0, t_w).unwrap();
        if reaction_time(&first, d).unwrap() != 2.0 * span {
            bad += 1;
        }
        let tau_l: f64 = rng.gen_range(0.0..5.0) * span;
        let tm = TimingModel::new(tau_sg, tau_l, t_w).unwrap();
        let eta = reaction_time(&tm, d).unwrap();
        if eta != reaction_time_cases(&tm, d).unwrap() {
            bad += 1;
        }
        // Short latency: 2 d tau_sg if decoding ends before the next window, else 3 d tau_sg.
        if tau_l < span {
            let expect = if t_w <= span - tau_l { 2.0 * span } else { 3.0 * span };
            if eta != expect {
                bad += 1;
            }
        }
    }
    let cfg = WindowConfig::new(3);
    let tm = |t_w| TimingModel::new(1.0, 0.0, t_w).unwrap();
    let strict = throughput_ok(&tm(1.0), &cfg) && !throughput_ok(&tm(3.0), &cfg) && throughput_ok(&tm(2.999_999), &cfg);
    (bad == 0 && strict, format!("10^4 random tuples: {bad} disagreements; throughput strict at T_w = tau_sg n_com: {strict}"))
}

fn c9_windows() -> Outcome {
    let g = build_rotated_memory_graph(3, 9, 1e-3, 10).unwrap();
    let whole = SyndromeDecoder::new(g.clone()).unwrap();
    let solver = IsolationDecoder::new(PerturbationScheme::SeededPrng { seed: 9, max_attempts: None });
    let single = WindowConfig::with_regions(3, 9, 0).unwrap();
    let multi = WindowConfig::new(3);
    let mut single_bad = 0;
    let mut agree = 0;
    let mut compared = 0;
    for shot in 0..1000u64 {
        let sample = sample_errors(&g, derive(&[0x99, shot]));
        let h = whole.decode(&sample.detection_events, &solver).unwrap();
        let w = sliding_window_decode(&g, &sample.detection_events, single, &solver).unwrap();
        if w.corrected_edges != h.recovery.corrected_edges || w.logical_flip_correction != h.recovery.logical_flip_correction {
            single_bad += 1;
        }
        if 2 * sample.detection_events.len() <= 14 {
            let oracle = whole.decode(&sample.detection_events, &ExhaustiveSolver).unwrap();
            let m = sliding_window_decode(&g, &sample.detection_events, multi, &solver).unwrap();
            compared += 1;
            if m.logical_flip_correction == oracle.recovery.logical_flip_correction {
                agree += 1;
            }
        }
    }
    (
        single_bad == 0,
        format!(
            "d = 3, 9 rounds, 10^3 shots: single window differs on {single_bad} (tolerance 0); n_com = n_buf = 3 agrees with whole-history oracle on {agree}/{compared} (reported)"
        ),
    )
}

fn c10_suppression() -> Outcome {
    let run = |d| run_memory_experiment(&MemoryConfig::new(d, 1e-3, 1_000_000, 10)).unwrap();
    let (r3, r5) = (run(3), run(5));
    (
        r5.logical_error_rate < r3.logical_error_rate && r5.wilson_high < r3.wilson_low,
        format!(
            "10^6 shots: d=3 {:.2e} [{:.2e}, {:.2e}], d=5 {:.2e} [{:.2e}, {:.2e}] (95% Wilson, must not overlap)",
            r3.logical_error_rate, r3.wilson_low, r3.wilson_high, r5.logical_error_rate, r5.wilson_low, r5.wilson_high
        ),
    )
}

fn c11_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_pmwpm");
    let cases: [&[&str]; 3] = [
        &["experiment", "-d", "3", "--distances", "5", "--shots", "3000", "--oracle-limit", "8", "--seed", "11"],
        &["experiment", "-d", "3", "--shots", "2000", "--seed", "11", "--format", "csv"],
        &["wmax-scan", "--distances", "3,5", "--shots", "3000", "--seed", "11"],
    ];
    let mut differing = Vec::new();
    for args in cases {
        let outputs: Vec<Vec<u8>> = ["1", "4", "8"]
            .iter()
            .map(|t| {
                let out = Command::new(bin).args(args).args(["--threads", t]).output().expect("spawn");
                assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
                out.stdout
            })
            .collect();
        if outputs.windows(2).any(|w| w[0] != w[1]) || outputs[0].is_empty() {
            differing.push(args[0]);
        }
    }
    (differing.is_empty(), format!("experiment (json, csv) and wmax-scan at 1, 4, 8 threads: differing {differing:?} (byte-exact)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("oracle soundness", c1_oracle_soundness),
        ("determinant equivalence", c2_determinants),
        ("characteristic polynomial", c3_characteristic),
        ("randomized isolation bound", c4_isolation_bound),
        ("W_max scaling", c5_wmax_scaling),
        ("perturbation order preservation", c6_order_preservation),
        ("derandomized family structure", c7_derandomized_structure),
        ("timing formulas", c8_timing),
        ("sliding-window consistency", c9_windows),
        ("below-threshold suppression", c10_suppression),
        ("determinism across thread counts", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let (ok, detail) = f();
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] criterion {:>2} {name}: {detail} ({:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
