//! Plain-text matrix format used by the CLI.
//!
//! Line 1: `rows cols` as decimal integers. The next `rows` lines each
//! hold `cols` whitespace-separated floats. Readers accept scientific
//! notation; the writer emits 17 significant digits so a round trip is
//! bit-exact.

use std::io::{BufRead, Write};
use std::path::Path;

use thiserror::Error;

use crate::matrix::{Matrix, MatrixError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

pub fn read_matrix(reader: impl BufRead, path: &str) -> Result<Matrix, IoError> {
    let parse_err = |line: usize, msg: String| IoError::Parse {
        path: path.to_string(),
        line,
        msg,
    };
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file".into()))?;
    let header = header.map_err(|e| parse_err(1, e.to_string()))?;
    let mut it = header.split_whitespace();
    let rows: usize = it
        .next()
        .ok_or_else(|| parse_err(1, "missing row count".into()))?
        .parse()
        .map_err(|e| parse_err(1, format!("bad row count: {e}")))?;
    let cols: usize = it
        .next()
        .ok_or_else(|| parse_err(1, "missing column count".into()))?
        .parse()
        .map_err(|e| parse_err(1, format!("bad column count: {e}")))?;
    if it.next().is_some() {
        return Err(parse_err(1, "trailing tokens after 'rows cols'".into()));
    }

    let mut data = Vec::with_capacity(rows * cols);
    let mut read_rows = 0;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
        let vals = vals.map_err(|e| parse_err(lineno, format!("bad float: {e}")))?;
        if vals.len() != cols {
            return Err(parse_err(
                lineno,
                format!("expected {cols} values, found {}", vals.len()),
            ));
        }
        data.extend(vals);
        read_rows += 1;
        if read_rows == rows {
            break;
        }
    }
    if read_rows != rows {
        return Err(parse_err(
            0,
            format!("expected {rows} rows, found {read_rows}"),
        ));
    }
    Ok(Matrix::from_rows(rows, cols, &data)?)
}

pub fn write_matrix(mut writer: impl Write, m: &Matrix) -> std::io::Result<()> {
    writeln!(writer, "{} {}", m.rows(), m.cols())?;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j > 0 {
                write!(writer, " ")?;
            }
            write!(writer, "{:.16e}", m.get(i, j))?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<Matrix, IoError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| IoError::File {
        path: path.display().to_string(),
        source: e,
    })?;
    read_matrix(std::io::BufReader::new(file), &path.display().to_string())
}

pub fn write_matrix_file(path: impl AsRef<Path>, m: &Matrix) -> Result<(), IoError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| IoError::File {
        path: path.display().to_string(),
        source: e,
    })?;
    write_matrix(std::io::BufWriter::new(file), m).map_err(|e| IoError::File {
        path: path.display().to_string(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_bits() {
        let m = Matrix::from_rows(2, 3, &[1.0, -2.5, 3.0e-17, 0.1, 1.0 / 3.0, 7.25]).unwrap();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        let back = read_matrix(buf.as_slice(), "buf").unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn accepts_scientific_notation() {
        let text = "1 2\n1e3 -2.5E-4\n";
        let m = read_matrix(text.as_bytes(), "inline").unwrap();
        assert_eq!(m.get(0, 0), 1000.0);
        assert_eq!(m.get(0, 1), -2.5e-4);
    }

    #[test]
    fn errors_carry_file_and_line() {
        let text = "2 2\n1 2\n3 oops\n";
        let err = read_matrix(text.as_bytes(), "bad.mat").unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("bad.mat:3:"), "{msg}");
    }

    #[test]
    fn short_file_is_an_error() {
        let text = "3 1\n1\n";
        assert!(read_matrix(text.as_bytes(), "short.mat").is_err());
    }
}
