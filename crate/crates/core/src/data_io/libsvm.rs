use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};
use crate::problem::SparseMatrix;

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedLine {
        line,
        reason: reason.into(),
    }
}

fn parse_line(text: &str, line: usize) -> Result<Option<(f64, Vec<(usize, f64)>)>> {
    let body = text.split('#').next().unwrap_or("");
    let mut fields = body.split_whitespace();
    let Some(label) = fields.next() else {
        return Ok(None);
    };
    let label: f64 = label
        .parse()
        .map_err(|_| malformed(line, format!("bad label {label:?}")))?;
    if !label.is_finite() {
        return Err(malformed(line, "non-finite label"));
    }
    let mut row = Vec::new();
    let mut last = 0usize;
    for field in fields {
        let (idx, val) = field
            .split_once(':')
            .ok_or_else(|| malformed(line, format!("expected index:value, got {field:?}")))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| malformed(line, format!("bad index {idx:?}")))?;
        if idx == 0 {
            return Err(malformed(line, "indices are 1-based"));
        }
        if idx <= last {
            return Err(malformed(line, format!("index {idx} after {last}")));
        }
        let val: f64 = val
            .parse()
            .map_err(|_| malformed(line, format!("bad value {val:?}")))?;
        if !val.is_finite() {
            return Err(malformed(line, "non-finite value"));
        }
        last = idx;
        row.push((idx - 1, val));
    }
    Ok(Some((label, row)))
}

/// Reads `<label> <idx>:<val> ...` lines with 1-based ascending indices.
/// Blank lines and `#` comments are skipped; labels are kept raw. The column
/// count is the largest index seen unless `cols` asks for more.
pub fn parse_libsvm<R: BufRead>(reader: R, cols: Option<usize>) -> Result<Dataset> {
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    let mut width = 0;
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let text = line.map_err(|e| malformed(line_no, e.to_string()))?;
        if let Some((label, row)) = parse_line(&text, line_no)? {
            if let Some(&(j, _)) = row.last() {
                width = width.max(j + 1);
            }
            labels.push(label);
            rows.push(row);
        }
    }
    let width = match cols {
        Some(c) if c < width => {
            return Err(Error::InvalidArgument(format!(
                "feature index {width} exceeds configured dimension {c}"
            )))
        }
        Some(c) => c,
        None => width.max(1),
    };
    Dataset::new(SparseMatrix::from_rows(width, &rows)?, labels)
}

pub fn parse_libsvm_str(text: &str, cols: Option<usize>) -> Result<Dataset> {
    parse_libsvm(text.as_bytes(), cols)
}

pub fn read_libsvm(path: &Path, cols: Option<usize>) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_libsvm(std::io::BufReader::new(file), cols)
}

/// Writes LIBSVM text that [`parse_libsvm`] reads back unchanged.
pub fn serialize_libsvm(ds: &Dataset) -> String {
    let mut out = String::new();
    for (i, label) in ds.labels.iter().enumerate() {
        let _ = write!(out, "{label}");
        let (idx, val) = ds.features.row(i);
        for (j, v) in idx.iter().zip(val) {
            let _ = write!(out, " {}:{v}", j + 1);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let ds = parse_libsvm_str("+1 1:0.5 3:2\n", None).unwrap();
        assert_eq!(ds.labels, vec![1.0]);
        assert_eq!(ds.features.ncols(), 3);
        assert_eq!(ds.features.to_rows(), vec![vec![(0, 0.5), (2, 2.0)]]);

        let ds = parse_libsvm_str("-1\n", None).unwrap();
        assert_eq!(ds.labels, vec![-1.0]);
        assert_eq!(ds.features.nnz(), 0);

        let err = parse_libsvm_str("1 2:a\n", None).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn comments_blank_lines_and_order() {
        let text = "# header\n\n1 1:1 # trailing\n  \n-1 2:3\n";
        let ds = parse_libsvm_str(text, Some(5)).unwrap();
        assert_eq!(ds.labels, vec![1.0, -1.0]);
        assert_eq!(ds.features.ncols(), 5);
        for bad in ["1 3:1 2:1", "1 2:1 2:1", "1 0:1", "x 1:1", "1 1", "1 1:inf"] {
            assert!(
                matches!(parse_libsvm_str(bad, None), Err(Error::MalformedLine { line: 1, .. })),
                "{bad}"
            );
        }
        let err = parse_libsvm_str("1 1:1\n1 1:2 1:3\n", None).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 2, .. }));
        assert!(parse_libsvm_str("1 4:1", Some(2)).is_err());
    }

    #[test]
    fn round_trip() {
        let text = "1 1:0.1 7:-2.5e-7\n-1\n3 2:1e300 3:4\n";
        let ds = parse_libsvm_str(text, None).unwrap();
        let again = parse_libsvm_str(&serialize_libsvm(&ds), None).unwrap();
        assert_eq!(ds, again);
    }
}
