//! Square real matrices representing operators in coordinates.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major `size × size` matrix. Serializes as a JSON array of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct OperatorMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl OperatorMatrix {
    pub fn new(size: usize, entries: Vec<f64>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument(
                "operator size must be positive".into(),
            ));
        }
        if entries.len() != size * size {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {size}x{size} operator, got {}",
                size * size,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "operator entries must be finite".into(),
            ));
        }
        Ok(Self { size, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != size) {
            return Err(Error::InvalidArgument(format!(
                "operator is not square: row of length {} in a {size}-row matrix",
                r.len()
            )));
        }
        Self::new(size, rows.concat())
    }

    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            entries: vec![0.0; size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.entries[i * size + i] = 1.0;
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.size + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.size)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `f ∘ T` as a coordinate functional.
    pub fn pull_back(&self, f: &[f64]) -> Vec<f64> {
        let n = self.size;
        (0..n)
            .map(|j| (0..n).map(|i| f[i] * self.entries[i * n + j]).sum())
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.size;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            size: self.size,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            size: self.size,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.size, self.size, &self.entries)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        let n = m.nrows();
        Self::new(n, (0..n * n).map(|k| m[(k / n, k % n)]).collect())
    }

    /// Row-major CSV without a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.entries.chunks(self.size) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split(',')
                    .map(|c| {
                        c.trim().parse::<f64>().map_err(|e| {
                            Error::InvalidArgument(format!("bad operator entry `{c}`: {e}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads CSV or, when the text starts with `[`, a JSON array of rows.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('[') {
            Self::from_json(text)
        } else {
            Self::from_csv(text)
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for OperatorMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<OperatorMatrix> for Vec<Vec<f64>> {
    fn from(m: OperatorMatrix) -> Self {
        m.rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_and_pull_back_agree() {
        let t = OperatorMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let x = [0.5, -1.0];
        let f = [2.0, 1.0];
        let tx = t.apply(&x);
        assert_eq!(tx, vec![-1.5, -2.5]);
        let ft = t.pull_back(&f);
        let lhs: f64 = f.iter().zip(&tx).map(|(a, b)| a * b).sum();
        let rhs: f64 = ft.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn csv_and_json_io() {
        let t = OperatorMatrix::from_csv("0,1\n0,0\n").unwrap();
        assert_eq!(t.get(0, 1), 1.0);
        assert_eq!(OperatorMatrix::from_csv(&t.to_csv()).unwrap(), t);
        let j = serde_json::to_string(&t).unwrap();
        assert_eq!(j, "[[0.0,1.0],[0.0,0.0]]");
        assert_eq!(OperatorMatrix::parse(&j).unwrap(), t);
        assert!(OperatorMatrix::from_csv("1,2\n3\n").is_err());
        assert!(OperatorMatrix::from_csv("1,x\n3,4").is_err());
        assert!(OperatorMatrix::from_json("[[1,2]]").is_err());
    }

    #[test]
    fn compose_matches_nalgebra() {
        let a = OperatorMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, -1.0]]).unwrap();
        let b = OperatorMatrix::from_rows(&[vec![0.5, 0.0], vec![3.0, 1.0]]).unwrap();
        let c = a.compose(&b);
        let expect = a.to_dmatrix() * b.to_dmatrix();
        assert_eq!(OperatorMatrix::from_dmatrix(&expect).unwrap(), c);
    }
}
