//! Compressed-row storage over the node adjacency pattern.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::mesh::Mesh;

/// Sorted CSR sparsity pattern; every row contains its diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl Pattern {
    pub fn from_mesh(mesh: &Mesh) -> Self {
        let mut row_ptr = Vec::with_capacity(mesh.num_nodes() + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for i in 0..mesh.num_nodes() {
            col_idx.extend_from_slice(mesh.neighbors(i));
            row_ptr.push(col_idx.len());
        }
        Pattern { row_ptr, col_idx }
    }

    pub fn n(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn index(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_ptr[i];
        self.row(i).binary_search(&j).ok().map(|k| start + k)
    }

    pub fn bandwidth(&self) -> usize {
        (0..self.n()).flat_map(|i| self.row(i).iter().map(move |&j| i.abs_diff(j))).max().unwrap_or(0)
    }

    /// Unordered adjacent pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| self.row(i).iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }
}

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pattern: Arc<Pattern>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(pattern: Arc<Pattern>) -> Self {
        let values = vec![0.0; pattern.nnz()];
        CsrMatrix { pattern, values }
    }

    pub fn pattern(&self) -> &Arc<Pattern> {
        &self.pattern
    }

    pub fn n(&self) -> usize {
        self.pattern.n()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entry `(i, j)`; zero outside the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pattern.index(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Adds `v` to entry `(i, j)`, which must be in the pattern.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.pattern.index(i, j).expect("entry outside sparsity pattern");
        self.values[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.pattern.index(i, j).expect("entry outside sparsity pattern");
        self.values[k] = v;
    }

    /// `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1];
        self.pattern.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n()];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y^T A x`.
    pub fn bilinear(&self, y: &[f64], x: &[f64]) -> f64 {
        (0..self.n()).map(|i| y[i] * self.row(i).map(|(j, v)| v * x[j]).sum::<f64>()).sum()
    }

    /// `self += alpha * other`; both must share one pattern.
    pub fn axpy(&mut self, alpha: f64, other: &CsrMatrix) {
        assert!(Arc::ptr_eq(&self.pattern, &other.pattern) || self.pattern == other.pattern);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        self.values.iter_mut().for_each(|v| *v *= alpha);
    }

    /// Replaces row `i` by the identity row.
    pub fn set_identity_row(&mut self, i: usize) {
        let range = self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1];
        for k in range {
            self.values[k] = if self.pattern.col_idx[k] == i { 1.0 } else { 0.0 };
        }
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n() {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }
}

/// Diagonal operator, used for the lumped mass matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalMatrix(pub Vec<f64>);

impl DiagonalMatrix {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.0
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.0.iter().zip(x).map(|(d, v)| d * v).collect()
    }

    pub fn trace(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `(x, y)_h = sum_i D_ii x_i y_i`.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.0.iter().zip(x).zip(y).map(|((d, a), b)| d * a * b).sum()
    }
}

pub(crate) fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v * v).sum())
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
