//! Newline-delimited round records: `round stabilizer stabilizer ...`.
//!
//! Blank lines and lines starting with `#` are skipped. A round without
//! detection events may be written as a bare index or left out.

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    /// Stabilizer indices within the round whose detectors fired.
    pub stabilizers: Vec<usize>,
}

impl RoundRecord {
    pub fn parse(line: &str, line_no: usize) -> Result<Option<Self>> {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return Ok(None);
        }
        let mut fields = line.split_whitespace().map(|f| {
            f.parse::<usize>()
                .map_err(|_| Error::format(format!("line {line_no}: `{f}` is not a non-negative integer")))
        });
        let round = fields.next().expect("non-empty line")?;
        let stabilizers = fields.collect::<Result<Vec<_>>>()?;
        Ok(Some(RoundRecord { round, stabilizers }))
    }

    pub fn to_line(&self) -> String {
        std::iter::once(self.round)
            .chain(self.stabilizers.iter().copied())
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Iterates the records of a reader line by line.
pub fn read_round_stream<R: BufRead>(reader: R) -> impl Iterator<Item = Result<RoundRecord>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Ok(l) => RoundRecord::parse(&l, i + 1).transpose(),
            Err(e) => Some(Err(e.into())),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let text = "# header\n0 1 4\n\n1\n3 2\n";
        let recs: Vec<_> = read_round_stream(text.as_bytes()).collect::<Result<_>>().unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[0], RoundRecord { round: 0, stabilizers: vec![1, 4] });
        assert!(recs[1].stabilizers.is_empty());
        assert_eq!(recs[2].to_line(), "3 2");
        let err = read_round_stream("0 x\n".as_bytes()).next().unwrap();
        assert!(err.unwrap_err().to_string().contains("line 1"));
    }
}
