//! Binary table file.
//!
//! Little-endian layout:
//!
//! ```text
//! magic "PMWPMTBL" | version u32 | graph hash [u8; 32]
//! num_detectors u64 | num_paths u64 | num_path_edges u64
//! pair_dist       num_detectors^2 x u64, row-major
//! nearest         num_detectors x (boundary u64, distance u64)
//! path offsets    (num_paths + 1) x u64
//! path edges      num_path_edges x u32
//! ```

use serde::Serialize;

use super::{BoundaryEntry, DistanceTable};
use crate::detector::hex;
use crate::error::{Error, Result};

pub const TABLE_MAGIC: &[u8; 8] = b"PMWPMTBL";
pub const TABLE_VERSION: u32 = 1;

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::format("table file is truncated"))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn count(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::format("count overflows usize"))
    }
}

impl DistanceTable {
    pub fn to_bytes(&self) -> Vec<u8> {
        let d = self.num_detectors;
        let mut out = Vec::with_capacity(
            64 + 8 * (d * d + 2 * d + self.path_offsets.len()) + 4 * self.path_edges.len(),
        );
        out.extend_from_slice(TABLE_MAGIC);
        out.extend_from_slice(&TABLE_VERSION.to_le_bytes());
        out.extend_from_slice(&self.graph_hash);
        out.extend_from_slice(&(d as u64).to_le_bytes());
        out.extend_from_slice(&((self.path_offsets.len() - 1) as u64).to_le_bytes());
        out.extend_from_slice(&(self.path_edges.len() as u64).to_le_bytes());
        for x in &self.pair_dist {
            out.extend_from_slice(&x.to_le_bytes());
        }
        for b in &self.nearest {
            out.extend_from_slice(&(b.boundary as u64).to_le_bytes());
            out.extend_from_slice(&b.distance.to_le_bytes());
        }
        for x in &self.path_offsets {
            out.extend_from_slice(&x.to_le_bytes());
        }
        for x in &self.path_edges {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader { buf, pos: 0 };
        if r.take(8)? != TABLE_MAGIC {
            return Err(Error::format("not a distance table file"));
        }
        let version = r.u32()?;
        if version != TABLE_VERSION {
            return Err(Error::format(format!("unsupported table version {version}")));
        }
        let graph_hash: [u8; 32] = r.take(32)?.try_into().unwrap();
        let d = r.count()?;
        let num_paths = r.count()?;
        let num_path_edges = r.count()?;
        if num_paths != d * d.saturating_sub(1) / 2 + d {
            return Err(Error::format("path count does not match detector count"));
        }
        let pair_dist = (0..d * d).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let nearest = (0..d)
            .map(|_| {
                Ok(BoundaryEntry { boundary: r.count()?, distance: r.u64()? })
            })
            .collect::<Result<Vec<_>>>()?;
        let path_offsets = (0..=num_paths).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let path_edges = (0..num_path_edges).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        if r.pos != buf.len() {
            return Err(Error::format("trailing bytes after table"));
        }
        let monotone = path_offsets.windows(2).all(|w| w[0] <= w[1]);
        if path_offsets[0] != 0 || !monotone || path_offsets[num_paths] != num_path_edges as u64 {
            return Err(Error::format("path offsets are inconsistent"));
        }
        Ok(DistanceTable {
            num_detectors: d,
            pair_dist,
            nearest,
            path_offsets,
            path_edges,
            graph_hash,
        })
    }

    pub fn write_to(&self, path: &std::path::Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_bytes())?)
    }

    pub fn read_from(path: &std::path::Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    pub fn summary(&self) -> TableSummary {
        let d = self.num_detectors;
        let mut pair_paths = Vec::new();
        for u in 0..d {
            for v in u + 1..d {
                pair_paths.push(PairRecord { u, v, distance: self.distance(u, v), path: self.pair_path(u, v).to_vec() });
            }
        }
        TableSummary {
            version: TABLE_VERSION,
            graph_hash: hex(&self.graph_hash),
            num_detectors: d,
            pair_dist: self.pair_dist.chunks(d.max(1)).map(<[u64]>::to_vec).collect(),
            nearest_boundary: (0..d)
                .map(|u| BoundaryRecord {
                    detector: u,
                    boundary: self.nearest[u].boundary,
                    distance: self.nearest[u].distance,
                    path: self.boundary_path(u).to_vec(),
                })
                .collect(),
            pair_paths,
        }
    }
}

/// Human-readable dump used by `table inspect`.
#[derive(Debug, Serialize)]
pub struct TableSummary {
    pub version: u32,
    pub graph_hash: String,
    pub num_detectors: usize,
    pub pair_dist: Vec<Vec<u64>>,
    pub nearest_boundary: Vec<BoundaryRecord>,
    pub pair_paths: Vec<PairRecord>,
}

#[derive(Debug, Serialize)]
pub struct BoundaryRecord {
    pub detector: usize,
    pub boundary: usize,
    pub distance: u64,
    pub path: Vec<u32>,
}

#[derive(Debug, Serialize)]
pub struct PairRecord {
    pub u: usize,
    pub v: usize,
    pub distance: u64,
    pub path: Vec<u32>,
}
