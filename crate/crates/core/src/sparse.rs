//! Compressed sparse row matrices, just enough for sector operators.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)))
    }

    /// Duplicate entries are summed, exact zeros dropped.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "entry ({r}, {c}) outside {nrows}x{ncols}");
            rows[r].push((c, v));
        }
        let mut m = Self::zeros(nrows, ncols);
        for (r, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|e| e.0);
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                let mut v = 0.0;
                while i < row.len() && row[i].0 == c {
                    v += row[i].1;
                    i += 1;
                }
                if v != 0.0 {
                    m.indices.push(c);
                    m.values.push(v);
                }
            }
            m.indptr[r + 1] = m.indices.len();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|e| e.0 == c).map_or(0.0, |e| e.1)
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn matmul(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::Invalid(format!(
                "shape mismatch {}x{} times {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let triplets = (0..self.nrows).flat_map(|r| {
            self.row(r)
                .flat_map(move |(k, a)| other.row(k).map(move |(c, b)| (r, c, a * b)))
                .collect::<Vec<_>>()
        });
        Ok(Self::from_triplets(self.nrows, other.ncols, triplets))
    }

    /// `self + k * other`.
    pub fn add_scaled(&self, other: &CsrMatrix, k: f64) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let t = self.triplets().chain(other.triplets().map(|(r, c, v)| (r, c, k * v)));
        Self::from_triplets(self.nrows, self.ncols, t)
    }

    pub fn scale(&self, k: f64) -> CsrMatrix {
        Self::from_triplets(self.nrows, self.ncols, self.triplets().map(|(r, c, v)| (r, c, k * v)))
    }

    pub fn trace(&self) -> f64 {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).sum()
    }

    pub fn has_negative_entries(&self) -> bool {
        self.values.iter().any(|v| *v < 0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            d[(r, c)] = v;
        }
        d
    }

    /// `row col value` lines with 17 significant digits.
    pub fn to_coordinate_text(&self) -> String {
        let mut s = String::new();
        for (r, c, v) in self.triplets() {
            let _ = writeln!(s, "{r} {c} {v:.16e}");
        }
        s
    }

    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        self.add_scaled(other, -1.0).values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assembly_and_products() {
        let a = CsrMatrix::from_triplets(2, 3, [(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0), (0, 0, 1.0)]);
        assert_eq!(a.get(0, 0), 2.0);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.matvec(&[1.0, 1.0, 1.0]), vec![4.0, 3.0]);
        let b = CsrMatrix::from_triplets(3, 2, [(0, 1, 1.0), (2, 0, -1.0), (1, 0, 2.0)]);
        let p = a.matmul(&b).unwrap();
        assert_eq!(p.to_dense(), a.to_dense() * b.to_dense());
        assert!(b.matmul(&b).is_err());
        let cancel = CsrMatrix::from_triplets(1, 1, [(0, 0, 1.0), (0, 0, -1.0)]);
        assert_eq!(cancel.nnz(), 0);
        assert_eq!(CsrMatrix::identity(4).trace(), 4.0);
    }

    #[test]
    fn coordinate_dump_round_trips() {
        let v = 0.1 + 0.2;
        let a = CsrMatrix::from_triplets(2, 2, [(1, 0, v)]);
        let text = a.to_coordinate_text();
        let parsed: f64 = text.split_whitespace().nth(2).unwrap().parse().unwrap();
        assert_eq!(parsed, v);
        assert!(text.starts_with("1 0 "));
    }
}
