//! Plain-text distribution files.
//!
//! ```text
//! n=3 total=6
//! 2 3<TAB>6
//! ```
//!
//! The header gives the leaf count and the sum of all counts. Each further
//! line is one support point (space-separated rationals), a tab, and its
//! count. Lines are written in lexicographic order of the support points.

use std::io::{self, BufRead, Write};

use super::distribution::{LengthDistribution, LengthSequence};
use crate::error::{Error, Result};
use crate::rational::parse_rational;

/// Streams `dist` to `out`, one support point per line.
pub fn write_distribution<W: Write>(out: &mut W, dist: &LengthDistribution) -> io::Result<()> {
    writeln!(out, "n={} total={}", dist.n(), dist.total())?;
    let mut line = String::new();
    for (seq, count) in dist.iter() {
        line.clear();
        for (i, x) in seq.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&x.to_string());
        }
        writeln!(out, "{line}\t{count}")?;
    }
    Ok(())
}

fn header_field<'a>(field: Option<&'a str>, name: &str) -> Option<&'a str> {
    field?.strip_prefix(name)?.strip_prefix('=')
}

/// Reads a distribution written by [`write_distribution`].
///
/// Input order is not required to be sorted; error positions are byte
/// offsets of the offending line.
pub fn read_distribution<R: BufRead>(input: R) -> Result<LengthDistribution> {
    let mut lines = input.lines();
    let io_err = |e: io::Error| Error::parse(0, format!("read failure: {e}"));
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(0, "missing header line"))?
        .map_err(io_err)?;
    let mut fields = header.split_whitespace();
    let n: usize = header_field(fields.next(), "n")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(0, format!("bad header `{header}`")))?;
    let total: u128 = header_field(fields.next(), "total")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(0, format!("bad header `{header}`")))?;
    let mut offset = header.len() + 1;
    let mut entries: Vec<(LengthSequence, u128)> = Vec::new();
    for line in lines {
        let line = line.map_err(io_err)?;
        let at = offset;
        offset += line.len() + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (values, count) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(at, "expected a tab before the count"))?;
        let count: u128 = count
            .trim()
            .parse()
            .map_err(|_| Error::parse(at, format!("bad count `{count}`")))?;
        let seq = values
            .split_whitespace()
            .map(|v| parse_rational(v).map_err(|_| Error::parse(at, format!("bad value `{v}`"))))
            .collect::<Result<LengthSequence>>()?;
        entries.push((seq, count));
    }
    LengthDistribution::from_entries(n, total, entries)
}
