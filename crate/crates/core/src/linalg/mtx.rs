//! MatrixMarket coordinate format (`real`, `general` or `symmetric`).

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use super::{LinalgError, SparseMatrix};

pub const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

#[derive(Debug, Error)]
pub enum MtxError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Matrix(#[from] LinalgError),
}

fn parse_err(line: usize, message: impl Into<String>) -> MtxError {
    MtxError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses MatrixMarket coordinate text with 1-based indices.
pub fn parse(text: &str) -> Result<SparseMatrix, MtxError> {
    let mut lines = text.lines().enumerate();
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let tokens: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(parse_err(1, "expected a coordinate MatrixMarket banner"));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field `{}`", tokens[3])));
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(1, format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(line_no, "size line needs rows, cols and nnz"));
                }
                let parsed: Result<Vec<usize>, _> = fields.iter().map(|f| f.parse::<usize>()).collect();
                let v = parsed.map_err(|e| parse_err(line_no, e.to_string()))?;
                size = Some((v[0], v[1], v[2]));
            }
            Some((rows, cols, _)) => {
                if fields.len() != 3 {
                    return Err(parse_err(line_no, "entry line needs row, col and value"));
                }
                let i: usize = fields[0].parse().map_err(|_| parse_err(line_no, "bad row index"))?;
                let j: usize = fields[1].parse().map_err(|_| parse_err(line_no, "bad column index"))?;
                let v: f64 = fields[2].parse().map_err(|_| parse_err(line_no, "bad value"))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(line_no, format!("index ({i}, {j}) out of range")));
                }
                entries.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    entries.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    let stored = if symmetric {
        entries.iter().filter(|e| e.0 >= e.1).count()
    } else {
        entries.len()
    };
    if stored != nnz {
        return Err(parse_err(1, format!("declared {nnz} entries, found {stored}")));
    }
    Ok(SparseMatrix::from_triplets(rows, cols, &entries)?)
}

/// Renders a matrix as `general` coordinate text, one stored entry per line.
pub fn to_string(a: &SparseMatrix) -> String {
    let mut out = String::with_capacity(32 * (a.nnz() + 2));
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(&format!("{} {} {}\n", a.rows(), a.cols(), a.nnz()));
    for (i, j, v) in a.triplets() {
        out.push_str(&format!("{} {} {:e}\n", i + 1, j + 1, v));
    }
    out
}

pub fn read(path: &Path) -> Result<SparseMatrix, MtxError> {
    parse(&fs::read_to_string(path)?)
}

pub fn write(path: &Path, a: &SparseMatrix) -> Result<(), MtxError> {
    let mut file = fs::File::create(path)?;
    file.write_all(to_string(a).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let a = SparseMatrix::from_triplets(3, 2, &[(0, 0, 0.1), (2, 1, -1.0 / 3.0), (1, 0, 1e-300)]).unwrap();
        let text = to_string(&a);
        assert!(text.starts_with(HEADER));
        assert_eq!(parse(&text).unwrap(), a);
    }

    #[test]
    fn symmetric_storage_is_expanded() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 4\n2 1 1\n";
        let a = parse(text).unwrap();
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.get(1, 0), 1.0);
        assert_eq!(a.get(0, 0), 4.0);
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse("").is_err());
        assert!(parse("%%MatrixMarket matrix array real general\n1 1\n1\n").is_err());
        assert!(parse(&format!("{HEADER}\n2 2 1\n3 1 1.0\n")).is_err());
        assert!(parse(&format!("{HEADER}\n2 2 2\n1 1 1.0\n")).is_err());
        assert!(parse(&format!("{HEADER}\n1 1 1\n1 1 nan\n")).is_err());
    }
}
