//! Compressed sparse row matrices for boundary operators and Laplacians.

use std::fmt::{Display, Write as _};
use std::ops::{AddAssign, Mul};

use nalgebra::DMatrix;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T> SparseMatrix<T>
where
    T: Copy + Zero + AddAssign + Mul<Output = T> + PartialEq,
{
    /// Duplicate entries are summed and explicit zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut row_of = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(
                r < rows && c < cols,
                "entry ({r}, {c}) outside {rows}x{cols}"
            );
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                row_of.push(r);
                last = Some((r, c));
            }
        }
        let mut kept_idx = Vec::with_capacity(indices.len());
        let mut kept_val = Vec::with_capacity(values.len());
        for ((c, v), r) in indices.into_iter().zip(values).zip(row_of) {
            if v != T::zero() {
                kept_idx.push(c);
                kept_val.push(v);
                indptr[r + 1] += 1;
            }
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        SparseMatrix {
            rows,
            cols,
            indptr,
            indices: kept_idx,
            values: kept_val,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_triplets(rows, cols, Vec::new())
    }

    pub fn identity(n: usize) -> Self
    where
        T: num_traits::One,
    {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, T::one())).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let (a, b) = (self.indptr[r], self.indptr[r + 1]);
        self.indices[a..b]
            .iter()
            .copied()
            .zip(self.values[a..b].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let (a, b) = (self.indptr[r], self.indptr[r + 1]);
        match self.indices[a..b].binary_search(&c) {
            Ok(i) => self.values[a + i],
            Err(_) => T::zero(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.cols,
            self.rows,
            self.triplets().map(|(r, c, v)| (c, r, v)).collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_triplets(
            self.rows,
            self.cols,
            self.triplets().chain(other.triplets()).collect(),
        )
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_triplets(
            self.rows,
            self.cols,
            self.triplets().map(|(r, c, v)| (r, c, v * s)).collect(),
        )
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut trips = Vec::new();
        let mut acc: Vec<Option<T>> = vec![None; other.cols];
        let mut touched = Vec::new();
        for r in 0..self.rows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    match &mut acc[c] {
                        Some(v) => *v += a * b,
                        slot @ None => {
                            *slot = Some(a * b);
                            touched.push(c);
                        }
                    }
                }
            }
            for c in touched.drain(..) {
                trips.push((r, c, acc[c].take().unwrap()));
            }
        }
        Self::from_triplets(self.rows, other.cols, trips)
    }

    pub fn map<U, F>(&self, f: F) -> SparseMatrix<U>
    where
        U: Copy + Zero + AddAssign + Mul<Output = U> + PartialEq,
        F: Fn(T) -> U,
    {
        SparseMatrix::from_triplets(
            self.rows,
            self.cols,
            self.triplets().map(|(r, c, v)| (r, c, f(v))).collect(),
        )
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.triplets().all(|(r, c, v)| self.get(c, r) == v)
    }
}

impl<T> SparseMatrix<T>
where
    T: Copy + Zero + AddAssign + Mul<Output = T> + PartialEq + Display,
{
    /// Coordinate-format text: a `rows cols nnz` header then one
    /// `row col value` line per entry, 0-based.
    pub fn to_coo_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {} {}", self.rows, self.cols, self.nnz()).unwrap();
        for (r, c, v) in self.triplets() {
            writeln!(out, "{r} {c} {v}").unwrap();
        }
        out
    }
}

impl SparseMatrix<f64> {
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.add(&other.scale(-1.0))
            .values
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl SparseMatrix<i64> {
    pub fn to_f64(&self) -> SparseMatrix<f64> {
        self.map(|v| v as f64)
    }
}
