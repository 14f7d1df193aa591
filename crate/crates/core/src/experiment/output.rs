//! CSV views of the reports. JSON goes through serde directly.

use serde::{Deserialize, Serialize};

use super::{MemoryReport, ScanReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryCsvRow {
    pub distance: usize,
    pub rounds: usize,
    pub p: f64,
    pub shots: u64,
    pub master_seed: u64,
    pub logical_errors: u64,
    pub decode_failures: u64,
    pub logical_error_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl From<&MemoryReport> for MemoryCsvRow {
    fn from(r: &MemoryReport) -> Self {
        MemoryCsvRow {
            distance: r.distance,
            rounds: r.rounds,
            p: r.p,
            shots: r.shots,
            master_seed: r.master_seed,
            logical_errors: r.logical_errors,
            decode_failures: r.decode_failures,
            logical_error_rate: r.logical_error_rate,
            wilson_low: r.wilson_low,
            wilson_high: r.wilson_high,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCsvRow {
    #[serde(rename = "|V|")]
    pub path_vertices: usize,
    pub min_w_max: u64,
    pub shots_at_size: u64,
    /// Distances joined by `;`.
    pub d_list: String,
}

fn write_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::format(e.to_string()))
}

fn read_rows<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::format(e.to_string())))
        .collect()
}

/// One summary row per report.
pub fn memory_csv(reports: &[MemoryReport]) -> Result<String> {
    write_rows(reports.iter().map(MemoryCsvRow::from))
}

pub fn parse_memory_csv(text: &str) -> Result<Vec<MemoryCsvRow>> {
    read_rows(text)
}

pub fn scan_csv(report: &ScanReport) -> Result<String> {
    write_rows(report.records.iter().map(|r| ScanCsvRow {
        path_vertices: r.path_vertices,
        min_w_max: r.min_w_max,
        shots_at_size: r.shots,
        d_list: r.distances.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(";"),
    }))
}

pub fn parse_scan_csv(text: &str) -> Result<Vec<ScanCsvRow>> {
    read_rows(text)
}
