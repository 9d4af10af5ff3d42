//! CSV datasets: fixed column order, 17 significant digits, LF endings.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric column by name; non-numeric cells are skipped.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .filter_map(|r| match &r[i] {
                    Cell::Num(v) => Some(*v),
                    Cell::Int(v) => Some(*v as f64),
                    Cell::Text(_) => None,
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(CliError::Dataset(format!(
                    "row {r} has {} cells, expected {}",
                    row.len(),
                    self.columns.len()
                )));
            }
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(v) => write!(out, "{v:.16e}").expect("writing to a String"),
                    Cell::Int(v) => write!(out, "{v}").expect("writing to a String"),
                    Cell::Text(s) => {
                        if s.contains([',', '"', '\n', '\r']) {
                            return Err(CliError::Dataset(format!(
                                "text cell {s:?} needs quoting"
                            )));
                        }
                        out.push_str(s);
                    }
                }
            }
            out.push('\n');
        }
        Ok(out)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `dataset` to `path` and returns the SHA-256 of the bytes written.
/// An empty dataset is an error and creates no file.
pub fn export_dataset(dataset: &Dataset, path: &Path) -> Result<String> {
    if dataset.rows.is_empty() {
        return Err(CliError::Dataset(format!(
            "refusing to write empty dataset {}",
            path.display()
        )));
    }
    let text = dataset.to_csv()?;
    std::fs::write(path, text.as_bytes())
        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    Ok(sha256_hex(text.as_bytes()))
}

/// Parses CSV written by [`Dataset::to_csv`]. Cells that parse as `i64` come
/// back as `Int`, then `f64` as `Num`, anything else as `Text`.
pub fn parse_csv(text: &str) -> Result<Dataset> {
    let mut lines = text.split_terminator('\n');
    let header = lines
        .next()
        .ok_or_else(|| CliError::Dataset("missing header".into()))?;
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for line in lines {
        let row: Vec<Cell> = line
            .split(',')
            .map(|s| {
                if let Ok(i) = s.parse::<i64>() {
                    Cell::Int(i)
                } else if let Ok(v) = s.parse::<f64>() {
                    Cell::Num(v)
                } else {
                    Cell::Text(s.to_string())
                }
            })
            .collect();
        if row.len() != columns.len() {
            return Err(CliError::Dataset(format!("ragged row: {line}")));
        }
        rows.push(row);
    }
    Ok(Dataset { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Dataset {
        let mut d = Dataset::new(&["name", "x", "flag"]);
        d.push(vec!["a".into(), 0.1.into(), true.into()]);
        d.push(vec!["b".into(), (-1.0 / 3.0).into(), false.into()]);
        d.push(vec!["c".into(), 6.02214076e23.into(), false.into()]);
        d
    }

    #[test]
    fn empty_dataset_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        let err = export_dataset(&Dataset::new(&["x"]), &path);
        assert!(err.is_err());
        assert!(!path.exists());
    }

    #[test]
    fn checksum_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        let c1 = export_dataset(&sample(), &p1).unwrap();
        let c2 = export_dataset(&sample(), &p2).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(c1, sha256_hex(&std::fs::read(&p1).unwrap()));
    }

    #[test]
    fn format_is_fixed() {
        let text = sample().to_csv().unwrap();
        assert!(text.starts_with("name,x,flag\na,1.0000000000000001e-1,1\n"));
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn parse_back_is_bit_exact() {
        let values = [
            0.1,
            -1.0 / 3.0,
            1e-300,
            5e-324,
            f64::MAX,
            std::f64::consts::PI,
            -0.0,
        ];
        let mut d = Dataset::new(&["v"]);
        for v in values {
            d.push(vec![v.into()]);
        }
        let back = parse_csv(&d.to_csv().unwrap()).unwrap();
        for (row, v) in back.rows.iter().zip(values) {
            match row[0] {
                Cell::Num(x) => assert_eq!(x.to_bits(), v.to_bits()),
                ref other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn commas_in_text_are_rejected() {
        let mut d = Dataset::new(&["t"]);
        d.push(vec!["a,b".into()]);
        assert!(d.to_csv().is_err());
    }
}
