use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::problem::ObservedEntries;

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedLine {
        line,
        reason: reason.into(),
    }
}

/// Reads tab-separated `user item rating timestamp` lines with 1-based ids
/// into `(user - 1, item - 1, rating)` triplets. Out-of-range errors report
/// the raw ids from the file.
pub fn parse_movielens<R: BufRead>(reader: R, shape: (usize, usize)) -> Result<ObservedEntries> {
    let (rows, cols) = shape;
    let mut entries = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let text = line.map_err(|e| malformed(line_no, e.to_string()))?;
        if text.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.trim_end_matches(['\r', '\n']).split('\t').collect();
        if fields.len() != 4 {
            return Err(malformed(line_no, format!("expected 4 fields, got {}", fields.len())));
        }
        let id = |s: &str, what: &str| -> Result<usize> {
            s.trim()
                .parse()
                .map_err(|_| malformed(line_no, format!("bad {what} {s:?}")))
        };
        let user = id(fields[0], "user")?;
        let item = id(fields[1], "item")?;
        let rating: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| malformed(line_no, format!("bad rating {:?}", fields[2])))?;
        if !rating.is_finite() {
            return Err(malformed(line_no, "non-finite rating"));
        }
        fields[3]
            .trim()
            .parse::<u64>()
            .map_err(|_| malformed(line_no, format!("bad timestamp {:?}", fields[3])))?;
        if user == 0 || item == 0 || user > rows || item > cols {
            return Err(Error::IndexOutOfRange {
                row: user,
                col: item,
                rows,
                cols,
            });
        }
        entries.push((user - 1, item - 1, rating));
    }
    ObservedEntries::new(shape, entries)
}

pub fn parse_movielens_str(text: &str, shape: (usize, usize)) -> Result<ObservedEntries> {
    parse_movielens(text.as_bytes(), shape)
}

pub fn read_movielens(path: &Path, shape: (usize, usize)) -> Result<ObservedEntries> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_movielens(std::io::BufReader::new(file), shape)
}
