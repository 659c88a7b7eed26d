//! Plain-text instance format:
//!
//! ```text
//! n
//! 1 <profit> <weight>
//! ...
//! n <profit> <weight>
//! <capacity>
//! ```
//!
//! Whitespace-separated decimal integers, LF or CRLF line endings.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::knapsack::instance::KnapsackInstance;

pub fn parse_instance(text: &str, name: &str) -> Result<KnapsackInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let n = match fields(line_no, header)?.as_slice() {
        [n] => *n,
        other => return Err(Error::parse(line_no, format!("expected item count, got {} fields", other.len()))),
    };
    if n == 0 {
        return Err(Error::parse(line_no, "item count must be at least 1"));
    }

    let mut profits = Vec::with_capacity(n as usize);
    let mut weights = Vec::with_capacity(n as usize);
    for expected_id in 1..=n {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(line_no + expected_id as usize, format!("missing item {expected_id}")))?;
        match fields(line_no, line)?.as_slice() {
            [id, profit, weight] => {
                if *id != expected_id {
                    return Err(Error::parse(line_no, format!("expected item id {expected_id}, got {id}")));
                }
                if *profit == 0 || *weight == 0 {
                    return Err(Error::parse(line_no, "profit and weight must be positive"));
                }
                profits.push(*profit);
                weights.push(*weight);
            }
            other => {
                return Err(Error::parse(
                    line_no,
                    format!("expected `id profit weight`, got {} fields", other.len()),
                ))
            }
        }
    }

    let (cap_line, line) = lines
        .next()
        .ok_or_else(|| Error::parse(text.lines().count() + 1, "missing capacity line"))?;
    let capacity = match fields(cap_line, line)?.as_slice() {
        [c] if *c > 0 => *c,
        [_] => return Err(Error::parse(cap_line, "capacity must be positive")),
        other => return Err(Error::parse(cap_line, format!("expected capacity, got {} fields", other.len()))),
    };
    if let Some((extra, _)) = lines.next() {
        return Err(Error::parse(extra, "unexpected content after capacity line"));
    }

    KnapsackInstance::new(name, profits, weights, capacity).map_err(|e| Error::parse(cap_line, e.to_string()))
}

fn fields(line_no: usize, line: &str) -> Result<Vec<u64>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<u64>()
                .map_err(|_| Error::parse(line_no, format!("not a non-negative integer: {tok:?}")))
        })
        .collect()
}

pub fn write_instance(inst: &KnapsackInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", inst.n());
    for (i, (v, w)) in inst.profits().iter().zip(inst.weights()).enumerate() {
        let _ = writeln!(out, "{} {} {}", i + 1, v, w);
    }
    let _ = writeln!(out, "{}", inst.capacity());
    out
}

/// Reads an instance file, naming it after the file stem.
pub fn read_instance(path: &Path) -> Result<KnapsackInstance> {
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".to_owned());
    parse_instance(&text, &name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_reference_text() {
        let inst = parse_instance("3\n1 4 3\n2 2 1\n3 1 1\n3\n", "a").unwrap();
        assert_eq!(inst.profits(), &[4, 2, 1]);
        assert_eq!(inst.weights(), &[3, 1, 1]);
        assert_eq!(inst.capacity(), 3);
        assert_eq!(inst.name(), "a");
    }

    #[test]
    fn crlf_and_missing_trailing_newline() {
        let inst = parse_instance("2\r\n1 5 2\r\n2 3 4\r\n7", "b").unwrap();
        assert_eq!(inst.profits(), &[5, 3]);
        assert_eq!(inst.capacity(), 7);
    }

    #[test]
    fn round_trip_fig1() {
        let inst = KnapsackInstance::new("I1", vec![4, 2, 1], vec![3, 2, 1], 3).unwrap();
        assert_eq!(parse_instance(&write_instance(&inst), "I1").unwrap(), inst);
    }

    fn line_of(err: Error) -> usize {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of(parse_instance("0\n", "x").unwrap_err()), 1);
        assert_eq!(line_of(parse_instance("2\n1 4 3\n3 2 1\n5\n", "x").unwrap_err()), 3);
        assert_eq!(line_of(parse_instance("2\n1 4 3\n2 0 1\n5\n", "x").unwrap_err()), 3);
        assert_eq!(line_of(parse_instance("1\n1 4 x\n5\n", "x").unwrap_err()), 2);
        assert_eq!(line_of(parse_instance("1\n1 4 3\n0\n", "x").unwrap_err()), 3);
        assert_eq!(line_of(parse_instance("1\n1 4 3\n5\n6\n", "x").unwrap_err()), 4);
        assert!(parse_instance("2\n1 4 3\n", "x").is_err());
        assert!(parse_instance("", "x").is_err());
    }
}
