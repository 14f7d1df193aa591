//! Python bindings, importable as `pmwpm`.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pmwpm::bigdet::BigMatrix;
use pmwpm::decoder::SyndromeDecoder;
use pmwpm::detector::{build_rotated_memory_graph, sample_errors};
use pmwpm::experiment::{run_memory_experiment, run_wmax_scan, MemoryConfig, ScanConfig};
use pmwpm::isolation::{ExhaustiveSolver, IsolationDecoder, MatchingSolver, PerturbationScheme};
use pmwpm::matching::{MatchingEdge, MatchingGraph};
use pmwpm::window::{reaction_time as eta, TimingModel};

fn err(e: pmwpm::Error) -> PyErr {
    match e {
        pmwpm::Error::InvalidParameter(_) | pmwpm::Error::TooLarge { .. } | pmwpm::Error::NotADetector(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn matrix(rows: Vec<Vec<BigInt>>) -> PyResult<BigMatrix> {
    BigMatrix::from_rows(&rows).map_err(err)
}

/// Determinant by the division-free Berkowitz algorithm.
#[pyfunction]
fn det(rows: Vec<Vec<BigInt>>) -> PyResult<BigInt> {
    Ok(matrix(rows)?.det_berkowitz())
}

/// Determinant by cofactor expansion; up to 10 x 10.
#[pyfunction]
fn det_naive(rows: Vec<Vec<BigInt>>) -> PyResult<BigInt> {
    matrix(rows)?.det_naive().map_err(err)
}

/// Coefficients `p_0..p_n` of `det(A - x I)`, highest power first.
#[pyfunction]
fn characteristic_coefficients(rows: Vec<Vec<BigInt>>) -> PyResult<Vec<BigInt>> {
    Ok(matrix(rows)?.characteristic_coefficients())
}

fn graph(num_vertices: usize, edges: Vec<(usize, usize, u64)>) -> PyResult<MatchingGraph> {
    let edges = edges.into_iter().map(|(u, v, weight)| MatchingEdge { u, v, weight }).collect();
    MatchingGraph::new(num_vertices, edges).map_err(err)
}

/// Minimum-weight perfect matching by weight isolation: `(pairs, weight, w_max_used)`.
#[pyfunction]
#[pyo3(signature = (num_vertices, edges, seed = 0))]
fn mwpm(num_vertices: usize, edges: Vec<(usize, usize, u64)>, seed: u64) -> PyResult<(Vec<(usize, usize)>, u64, u64)> {
    let g = graph(num_vertices, edges)?;
    let solver = IsolationDecoder::new(PerturbationScheme::SeededPrng { seed, max_attempts: None });
    let out = solver.solve(&g).map_err(err)?;
    Ok((out.matching.pairs, out.matching.total_base_weight, out.w_max_used))
}

/// Exhaustive reference: `(pairs, weight)`; up to 14 vertices.
#[pyfunction]
fn brute_force_mwpm(num_vertices: usize, edges: Vec<(usize, usize, u64)>) -> PyResult<(Vec<(usize, usize)>, u64)> {
    let g = graph(num_vertices, edges)?;
    let out = ExhaustiveSolver.solve(&g).map_err(err)?;
    Ok((out.matching.pairs, out.matching.total_base_weight))
}

/// Surface-code memory decoder with its lookup table.
#[pyclass(module = "pmwpm")]
struct Decoder {
    inner: SyndromeDecoder,
    solver: IsolationDecoder,
}

#[pymethods]
impl Decoder {
    #[new]
    #[pyo3(signature = (distance, rounds = None, p = 1e-3, scale_c = 10, seed = 0))]
    fn new(distance: usize, rounds: Option<usize>, p: f64, scale_c: u64, seed: u64) -> PyResult<Self> {
        let g = build_rotated_memory_graph(distance, rounds.unwrap_or(distance), p, scale_c).map_err(err)?;
        Ok(Decoder {
            inner: SyndromeDecoder::new(g).map_err(err)?,
            solver: IsolationDecoder::new(PerturbationScheme::SeededPrng { seed, max_attempts: None }),
        })
    }

    #[getter]
    fn num_detectors(&self) -> usize {
        self.inner.graph().num_detectors()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.graph().edges().len()
    }

    #[getter]
    fn graph_hash(&self) -> String {
        self.inner.graph().hash_hex()
    }

    /// `(detection_events, logical_flip)` of one edge-flip sample.
    fn sample(&self, seed: u64) -> (Vec<usize>, bool) {
        let s = sample_errors(self.inner.graph(), seed);
        (s.detection_events, s.logical_flip)
    }

    /// `(corrected_edges, logical_flip_correction, matching_weight)`.
    fn decode(&self, py: Python<'_>, events: Vec<usize>) -> PyResult<(Vec<usize>, bool, u64)> {
        let d = py.detach(|| self.inner.decode(&events, &self.solver)).map_err(err)?;
        Ok((d.recovery.corrected_edges, d.recovery.logical_flip_correction, d.outcome.matching.total_base_weight))
    }
}

/// Memory experiment; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (distance, p = 1e-3, shots = 1000, seed = 0, rounds = None))]
fn memory_experiment(py: Python<'_>, distance: usize, p: f64, shots: u64, seed: u64, rounds: Option<usize>) -> PyResult<String> {
    let cfg = MemoryConfig { rounds: rounds.unwrap_or(distance), ..MemoryConfig::new(distance, p, shots, seed) };
    let r = py.detach(|| run_memory_experiment(&cfg)).map_err(err)?;
    serde_json::to_string(&r).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// `W_max` scan; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (distances, shots = 1000, seed = 0, p = 1e-3, size_cap = 30))]
fn wmax_scan(py: Python<'_>, distances: Vec<usize>, shots: u64, seed: u64, p: f64, size_cap: usize) -> PyResult<String> {
    let cfg = ScanConfig { p, size_cap, ..ScanConfig::new(distances, shots, seed) };
    let r = py.detach(|| run_wmax_scan(&cfg)).map_err(err)?;
    serde_json::to_string(&r).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Sliding-window reaction time.
#[pyfunction]
fn reaction_time(d: usize, tau_sg: f64, tau_l: f64, t_w: f64) -> PyResult<f64> {
    eta(&TimingModel::new(tau_sg, tau_l, t_w).map_err(err)?, d).map_err(err)
}

#[pymodule]
#[pyo3(name = "pmwpm")]
fn pmwpm_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(det, m)?)?;
    m.add_function(wrap_pyfunction!(det_naive, m)?)?;
    m.add_function(wrap_pyfunction!(characteristic_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(mwpm, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_mwpm, m)?)?;
    m.add_function(wrap_pyfunction!(memory_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(wmax_scan, m)?)?;
    m.add_function(wrap_pyfunction!(reaction_time, m)?)?;
    m.add_class::<Decoder>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
