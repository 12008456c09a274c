//! Per-step matrix statistics.

use std::fmt;
use std::io::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    /// Homology of the zero-signature slice (or of the whole space when naive).
    Hom,
    /// One lifting problem on a nonzero signature slice.
    Lift,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Hom => "hom",
            Phase::Lift => "lift",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatsRecord {
    pub phase: Phase,
    pub s: u32,
    pub t: u32,
    /// Signature rank of the slice; 0 for hom records.
    pub rank: u64,
    pub rows: usize,
    pub cols: usize,
    pub ms: u64,
    /// Only set on hom records.
    pub new_gens: Option<usize>,
}

impl StatsRecord {
    fn sort_key(&self) -> (u32, u32, Phase, u64) {
        (self.t, self.s, self.phase, self.rank)
    }
}

pub const STATS_HEADER: &str = "# steenres-stats v1";
pub const STATS_COLUMNS: &str = "phase\ts\tt\trank\trows\tcols\tms\tnew_gens";

/// Sorts records into `(t, s, phase, rank)` order.
pub fn sort_records(records: &mut [StatsRecord]) {
    records.sort_by_key(StatsRecord::sort_key);
}

pub fn write_tsv_header<W: Write>(mut out: W) -> io::Result<()> {
    writeln!(out, "{STATS_HEADER}")?;
    writeln!(out, "{STATS_COLUMNS}")
}

pub fn write_tsv_rows<W: Write>(mut out: W, records: &[StatsRecord]) -> io::Result<()> {
    for r in records {
        let new_gens = r.new_gens.map_or(String::from("-"), |n| n.to_string());
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.phase, r.s, r.t, r.rank, r.rows, r.cols, r.ms, new_gens
        )?;
    }
    Ok(())
}

/// Parses a stats file written by [`write_tsv_header`] and [`write_tsv_rows`].
pub fn parse_tsv(text: &str) -> Result<Vec<StatsRecord>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(STATS_HEADER) {
        return Err("missing stats header".into());
    }
    if lines.next() != Some(STATS_COLUMNS) {
        return Err("unexpected stats columns".into());
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 8 {
                return Err(format!("bad stats line: {line}"));
            }
            let num = |i: usize| f[i].parse::<u64>().map_err(|e| format!("{line}: {e}"));
            Ok(StatsRecord {
                phase: match f[0] {
                    "hom" => Phase::Hom,
                    "lift" => Phase::Lift,
                    other => return Err(format!("unknown phase {other}")),
                },
                s: num(1)? as u32,
                t: num(2)? as u32,
                rank: num(3)?,
                rows: num(4)? as usize,
                cols: num(5)? as usize,
                ms: num(6)?,
                new_gens: if f[7] == "-" { None } else { Some(num(7)? as usize) },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_roundtrip() {
        let mut records = vec![
            StatsRecord { phase: Phase::Lift, s: 2, t: 9, rank: 3, rows: 4, cols: 5, ms: 0, new_gens: None },
            StatsRecord { phase: Phase::Hom, s: 2, t: 9, rank: 0, rows: 7, cols: 8, ms: 1, new_gens: Some(1) },
            StatsRecord { phase: Phase::Hom, s: 0, t: 9, rank: 0, rows: 0, cols: 8, ms: 1, new_gens: Some(0) },
        ];
        sort_records(&mut records);
        assert_eq!(records[0].s, 0);
        assert_eq!(records[1].phase, Phase::Hom);
        let mut buf = Vec::new();
        write_tsv_header(&mut buf).unwrap();
        write_tsv_rows(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(parse_tsv(&text).unwrap(), records);
    }
}
