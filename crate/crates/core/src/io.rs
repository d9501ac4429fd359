//! Text formats for snapshot series and membership tables.
//!
//! Snapshot files start with a header `# n=<n> T=<T>` followed by one line
//! `<t_index> <i> <j>` per undirected edge, where `t_index` is 1-based and
//! nodes are 0-based. Other lines starting with `#` are comments. The writer
//! emits the canonical form: header, then edges sorted by `(t, i, j)` with
//! `i < j`.
//!
//! Membership tables are CSV with header `t_index,node,community`
//! (1-based time, 0-based node, 1-based community).

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::MembershipSequence;
use crate::network::{Adjacency, AdjacencySeries};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_header(body: &str, line: usize) -> Result<(usize, usize)> {
    let (mut n, mut t) = (None, None);
    for token in body.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("malformed header token {token:?}")))?;
        let value: usize =
            value.parse().map_err(|_| parse_err(line, format!("header value {value:?} is not an integer")))?;
        match key {
            "n" => n = Some(value),
            "T" => t = Some(value),
            _ => return Err(parse_err(line, format!("unknown header key {key:?}"))),
        }
    }
    match (n, t) {
        (Some(n), Some(t)) if t > 0 => Ok((n, t)),
        (Some(_), Some(_)) => Err(parse_err(line, "T must be positive")),
        _ => Err(parse_err(line, "header must define n and T")),
    }
}

/// Parses a snapshot series. Duplicate edges collapse to one.
pub fn read_series<R: Read>(reader: R) -> Result<AdjacencySeries> {
    let mut snapshots: Option<Vec<Adjacency>> = None;
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let Some(snaps) = snapshots.as_mut() else {
            let body = trimmed.strip_prefix('#').unwrap_or(trimmed);
            let (n, t) = parse_header(body, line_no)?;
            snapshots = Some(vec![Adjacency::empty(n); t]);
            continue;
        };
        if trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(line_no, format!("expected `t i j`, found {} fields", fields.len())));
        }
        let mut nums = [0usize; 3];
        for (slot, field) in nums.iter_mut().zip(&fields) {
            *slot = field.parse().map_err(|_| parse_err(line_no, format!("{field:?} is not a non-negative integer")))?;
        }
        let [t, i, j] = nums;
        let (n, t_count) = (snaps[0].n(), snaps.len());
        if t == 0 || t > t_count {
            return Err(parse_err(line_no, format!("time index {t} outside 1..={t_count}")));
        }
        if i >= n || j >= n {
            return Err(parse_err(line_no, format!("node index {} not below n={n}", i.max(j))));
        }
        if i == j {
            return Err(parse_err(line_no, format!("self-loop at node {i}")));
        }
        snaps[t - 1].add_edge(i, j)?;
    }
    let snapshots = snapshots.ok_or_else(|| parse_err(1, "missing `# n=<n> T=<T>` header"))?;
    AdjacencySeries::new(snapshots)
}

pub fn format_series(series: &AdjacencySeries) -> String {
    let mut out = format!("# n={} T={}\n", series.n(), series.len());
    for (t, snap) in series.snapshots().iter().enumerate() {
        for (i, j) in snap.edges() {
            writeln!(out, "{} {i} {j}", t + 1).expect("writing to a String cannot fail");
        }
    }
    out
}

pub fn write_series<W: Write>(mut writer: W, series: &AdjacencySeries) -> Result<()> {
    writer.write_all(format_series(series).as_bytes())?;
    Ok(())
}

pub fn load_series(path: impl AsRef<Path>) -> Result<AdjacencySeries> {
    read_series(fs::File::open(path)?)
}

pub fn save_series(path: impl AsRef<Path>, series: &AdjacencySeries) -> Result<()> {
    fs::write(path, format_series(series))?;
    Ok(())
}

pub fn format_memberships(m: &MembershipSequence) -> String {
    let mut out = String::from("t_index,node,community\n");
    for (t, row) in m.rows().iter().enumerate() {
        for (node, label) in row.iter().enumerate() {
            writeln!(out, "{},{node},{label}", t + 1).expect("writing to a String cannot fail");
        }
    }
    out
}

/// Parses a membership table. Rows may come in any order but must cover
/// every `(t_index, node)` pair exactly once. `k` defaults to the largest label.
pub fn read_memberships<R: Read>(reader: R, k: Option<usize>) -> Result<MembershipSequence> {
    let mut entries = Vec::new();
    let mut header_seen = false;
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !header_seen {
            if trimmed.replace(' ', "") != "t_index,node,community" {
                return Err(parse_err(line_no, "expected header `t_index,node,community`"));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(line_no, format!("expected 3 columns, found {}", fields.len())));
        }
        let mut nums = [0usize; 3];
        for (slot, field) in nums.iter_mut().zip(&fields) {
            *slot = field.parse().map_err(|_| parse_err(line_no, format!("{field:?} is not a non-negative integer")))?;
        }
        if nums[0] == 0 {
            return Err(parse_err(line_no, "t_index is 1-based"));
        }
        entries.push((line_no, nums));
    }
    if entries.is_empty() {
        return Err(parse_err(1, "membership table has no rows"));
    }
    let t_count = entries.iter().map(|(_, e)| e[0]).max().unwrap_or(0);
    let n = entries.iter().map(|(_, e)| e[1]).max().unwrap_or(0) + 1;
    let k = k.unwrap_or_else(|| entries.iter().map(|(_, e)| e[2]).max().unwrap_or(1));
    let mut labels = vec![vec![0usize; n]; t_count];
    for (line_no, [t, node, label]) in entries {
        let slot = &mut labels[t - 1][node];
        if *slot != 0 {
            return Err(parse_err(line_no, format!("duplicate entry for t_index {t}, node {node}")));
        }
        *slot = label;
    }
    if let Some((t, node)) = labels
        .iter()
        .enumerate()
        .find_map(|(t, row)| row.iter().position(|&l| l == 0).map(|node| (t, node)))
    {
        return Err(Error::invalid(format!("missing or zero label for t_index {}, node {node}", t + 1)));
    }
    MembershipSequence::new(k, labels)
}

pub fn load_memberships(path: impl AsRef<Path>, k: Option<usize>) -> Result<MembershipSequence> {
    read_memberships(fs::File::open(path)?, k)
}

pub fn save_memberships(path: impl AsRef<Path>, m: &MembershipSequence) -> Result<()> {
    fs::write(path, format_memberships(m))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let s = read_series("n=3 T=1\n1 0 1\n".as_bytes()).unwrap();
        assert_eq!((s.n(), s.len()), (3, 1));
        assert!(s.snapshot(0).has_edge(1, 0));
        assert_eq!(s.snapshot(0).edge_count(), 1);
    }

    #[test]
    fn validation_errors_carry_lines() {
        let cases = [
            ("# n=3 T=1\n1 2 2\n", 2),
            ("# n=3 T=1\n1 0 3\n", 2),
            ("# n=3 T=2\n\n3 0 1\n", 3),
            ("# n=3 T=2\n0 0 1\n", 2),
            ("# n=3\n", 1),
            ("# n=3 T=1\n1 0\n", 2),
            ("# n=x T=1\n", 1),
        ];
        for (text, line) in cases {
            match read_series(text.as_bytes()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(read_series("".as_bytes()).is_err());
    }

    #[test]
    fn canonical_round_trip() {
        let messy = "# n=4 T=2\n# comment\n2 3 1\n1 1 0\n2 1 3\n1 2 3\n";
        let s = read_series(messy.as_bytes()).unwrap();
        let canonical = format_series(&s);
        assert_eq!(canonical, "# n=4 T=2\n1 0 1\n1 2 3\n2 1 3\n");
        assert_eq!(format_series(&read_series(canonical.as_bytes()).unwrap()), canonical);
    }

    #[test]
    fn memberships_round_trip() {
        let m = MembershipSequence::new(2, vec![vec![1, 2, 2], vec![2, 2, 1]]).unwrap();
        let text = format_memberships(&m);
        assert!(text.starts_with("t_index,node,community\n1,0,1\n"));
        assert_eq!(read_memberships(text.as_bytes(), Some(2)).unwrap(), m);
        assert!(read_memberships("t_index,node,community\n1,0,1\n1,0,2\n".as_bytes(), None).is_err());
        assert!(read_memberships("t_index,node,community\n1,1,1\n".as_bytes(), None).is_err());
    }
}
