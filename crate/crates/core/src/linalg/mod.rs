//! Sparse symmetric storage, fill-reducing ordering, Cholesky and CG.

mod cg;
mod cholesky;
mod ordering;

pub use cg::{conjugate_gradient, CgOutcome};
pub use cholesky::{Cholesky, Symbolic};
pub use ordering::nested_dissection;

use std::fmt::Write as _;

/// Symmetric matrix stored as its upper triangle in compressed columns;
/// row indices inside each column are sorted and the diagonal is always present.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCsc {
    pub n: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SymCsc {
    /// Pattern from index pairs (either orientation); values start at zero.
    pub fn pattern(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut cols: Vec<Vec<usize>> = (0..n).map(|j| vec![j]).collect();
        for (a, b) in pairs {
            let (i, j) = if a <= b { (a, b) } else { (b, a) };
            cols[j].push(i);
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for mut c in cols {
            c.sort_unstable();
            c.dedup();
            row_idx.extend_from_slice(&c);
            col_ptr.push(row_idx.len());
        }
        let nnz = row_idx.len();
        SymCsc { n, col_ptr, row_idx, values: vec![0.0; nnz] }
    }

    pub fn from_triplets(n: usize, trips: &[(usize, usize, f64)]) -> Self {
        let mut m = Self::pattern(n, trips.iter().map(|&(i, j, _)| (i, j)));
        for &(i, j, v) in trips {
            let s = m.slot(i, j).expect("slot exists");
            m.values[s] += v;
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn slot(&self, a: usize, b: usize) -> Option<usize> {
        let (i, j) = if a <= b { (a, b) } else { (b, a) };
        let lo = self.col_ptr[j];
        let hi = self.col_ptr[j + 1];
        self.row_idx[lo..hi].binary_search(&i).ok().map(|k| lo + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.values[s])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.values[self.col_ptr[j + 1] - 1]).collect()
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.n {
            let xj = x[j];
            let mut acc = 0.0;
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                let i = self.row_idx[p];
                let v = self.values[p];
                if i == j {
                    acc += v * xj;
                } else {
                    acc += v * x[i];
                    y[i] += v * xj;
                }
            }
            y[j] += acc;
        }
    }

    /// Off-diagonal neighbour lists in CSR form.
    pub fn adjacency(&self) -> (Vec<usize>, Vec<usize>) {
        let mut deg = vec![0usize; self.n];
        for j in 0..self.n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                let i = self.row_idx[p];
                if i != j {
                    deg[i] += 1;
                    deg[j] += 1;
                }
            }
        }
        let mut xadj = vec![0usize; self.n + 1];
        for v in 0..self.n {
            xadj[v + 1] = xadj[v] + deg[v];
        }
        let mut fill = xadj[..self.n].to_vec();
        let mut adj = vec![0usize; xadj[self.n]];
        for j in 0..self.n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                let i = self.row_idx[p];
                if i != j {
                    adj[fill[i]] = j;
                    fill[i] += 1;
                    adj[fill[j]] = i;
                    fill[j] += 1;
                }
            }
        }
        (xadj, adj)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for j in 0..self.n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                let i = self.row_idx[p];
                m[(i, j)] = self.values[p];
                m[(j, i)] = self.values[p];
            }
        }
        m
    }

    /// MatrixMarket coordinate text, symmetric, lower triangle, 1-based.
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
        let _ = writeln!(s, "{} {} {}", self.n, self.n, self.nnz());
        for j in 0..self.n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                let _ = writeln!(s, "{} {} {:e}", j + 1, self.row_idx[p] + 1, self.values[p]);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_and_mirror() {
        let m = SymCsc::from_triplets(3, &[(0, 0, 2.0), (1, 0, -1.0), (0, 1, -1.0), (1, 1, 2.0), (2, 2, 1.0)]);
        assert_eq!(m.get(0, 1), -2.0);
        assert_eq!(m.get(1, 0), -2.0);
        assert_eq!(m.get(0, 2), 0.0);
        let mut y = vec![0.0; 3];
        m.mul_vec(&[1.0, 1.0, 1.0], &mut y);
        assert_eq!(y, vec![0.0, 0.0, 1.0]);
        assert!(m.to_matrix_market().starts_with("%%MatrixMarket"));
    }
}
