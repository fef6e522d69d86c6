use std::sync::Arc;

use super::{nested_dissection, SymCsc};
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// Ordering, elimination tree and column counts for one sparsity pattern.
#[derive(Debug, Clone)]
pub struct Symbolic {
    pub n: usize,
    pub perm: Vec<usize>,
    pub iperm: Vec<usize>,
    c_ptr: Vec<usize>,
    c_idx: Vec<usize>,
    slot_map: Vec<usize>,
    parent: Vec<usize>,
    l_ptr: Vec<usize>,
    flops: f64,
}

fn ereach(c_ptr: &[usize], c_idx: &[usize], k: usize, parent: &[usize], stack: &mut [usize], mark: &mut [usize]) -> usize {
    let n = parent.len();
    let mut top = n;
    mark[k] = k;
    for &r in &c_idx[c_ptr[k]..c_ptr[k + 1]] {
        let mut i = r;
        if i > k {
            continue;
        }
        let mut len = 0;
        while mark[i] != k {
            stack[len] = i;
            len += 1;
            mark[i] = k;
            i = parent[i];
        }
        while len > 0 {
            top -= 1;
            len -= 1;
            stack[top] = stack[len];
        }
    }
    top
}

impl Symbolic {
    pub fn analyze(a: &SymCsc) -> Self {
        let (xadj, adj) = a.adjacency();
        let perm = nested_dissection(&xadj, &adj);
        Self::with_ordering(a, perm)
    }

    pub fn with_ordering(a: &SymCsc, perm: Vec<usize>) -> Self {
        let n = a.n;
        let mut iperm = vec![0; n];
        for (k, &v) in perm.iter().enumerate() {
            iperm[v] = k;
        }
        // permuted upper pattern with a map from original slots
        let mut cols: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for j in 0..n {
            for p in a.col_ptr[j]..a.col_ptr[j + 1] {
                let (x, y) = (iperm[a.row_idx[p]], iperm[j]);
                let (i, jj) = if x <= y { (x, y) } else { (y, x) };
                cols[jj].push((i, p));
            }
        }
        let mut c_ptr = vec![0];
        let mut c_idx = Vec::with_capacity(a.nnz());
        let mut slot_map = vec![0; a.nnz()];
        for mut c in cols {
            c.sort_unstable();
            for (i, p) in c {
                slot_map[p] = c_idx.len();
                c_idx.push(i);
            }
            c_ptr.push(c_idx.len());
        }
        let mut parent = vec![NONE; n];
        let mut ancestor = vec![NONE; n];
        for k in 0..n {
            for &r in &c_idx[c_ptr[k]..c_ptr[k + 1]] {
                let mut i = r;
                while i != NONE && i < k {
                    let next = ancestor[i];
                    ancestor[i] = k;
                    if next == NONE {
                        parent[i] = k;
                    }
                    i = next;
                }
            }
        }
        let mut counts = vec![1usize; n];
        let mut stack = vec![0; n];
        let mut mark = vec![NONE; n];
        for k in 0..n {
            let top = ereach(&c_ptr, &c_idx, k, &parent, &mut stack, &mut mark);
            for &i in &stack[top..n] {
                counts[i] += 1;
            }
        }
        let mut l_ptr = vec![0; n + 1];
        let mut flops = 0.0;
        for j in 0..n {
            l_ptr[j + 1] = l_ptr[j] + counts[j];
            flops += (counts[j] as f64) * (counts[j] as f64);
        }
        Symbolic { n, perm, iperm, c_ptr, c_idx, slot_map, parent, l_ptr, flops }
    }

    pub fn factor_nnz(&self) -> usize {
        self.l_ptr[self.n]
    }

    /// Approximate floating point work of one numeric factorization.
    pub fn flops(&self) -> f64 {
        self.flops
    }
}

/// Numeric factor P A Pᵀ = L Lᵀ (up-looking, simplicial).
#[derive(Debug, Clone)]
pub struct Cholesky {
    sym: Arc<Symbolic>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
}

impl Cholesky {
    pub fn factor(sym: Arc<Symbolic>, a: &SymCsc) -> Result<Self> {
        let n = sym.n;
        let mut cx = vec![0.0; sym.c_idx.len()];
        for (p, &v) in a.values.iter().enumerate() {
            cx[sym.slot_map[p]] = v;
        }
        let lnz = sym.factor_nnz();
        let mut l_idx = vec![0; lnz];
        let mut l_val = vec![0.0; lnz];
        let mut next: Vec<usize> = sym.l_ptr[..n].to_vec();
        let mut x = vec![0.0; n];
        let mut stack = vec![0; n];
        let mut mark = vec![NONE; n];
        for k in 0..n {
            let top = ereach(&sym.c_ptr, &sym.c_idx, k, &sym.parent, &mut stack, &mut mark);
            x[k] = 0.0;
            for p in sym.c_ptr[k]..sym.c_ptr[k + 1] {
                x[sym.c_idx[p]] = cx[p];
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &i in &stack[top..n] {
                let lki = x[i] / l_val[sym.l_ptr[i]];
                x[i] = 0.0;
                for p in sym.l_ptr[i] + 1..next[i] {
                    x[l_idx[p]] -= l_val[p] * lki;
                }
                d -= lki * lki;
                let p = next[i];
                next[i] += 1;
                l_idx[p] = k;
                l_val[p] = lki;
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::SingularPrecision { pivot: sym.perm[k] });
            }
            let p = next[k];
            next[k] += 1;
            l_idx[p] = k;
            l_val[p] = d.sqrt();
        }
        Ok(Cholesky { sym, l_idx, l_val })
    }

    pub fn symbolic(&self) -> &Arc<Symbolic> {
        &self.sym
    }

    fn lower_solve(&self, y: &mut [f64]) {
        let lp = &self.sym.l_ptr;
        for j in 0..self.sym.n {
            y[j] /= self.l_val[lp[j]];
            let yj = y[j];
            for p in lp[j] + 1..lp[j + 1] {
                y[self.l_idx[p]] -= self.l_val[p] * yj;
            }
        }
    }

    fn upper_solve(&self, y: &mut [f64]) {
        let lp = &self.sym.l_ptr;
        for j in (0..self.sym.n).rev() {
            let mut s = y[j];
            for p in lp[j] + 1..lp[j + 1] {
                s -= self.l_val[p] * y[self.l_idx[p]];
            }
            y[j] = s / self.l_val[lp[j]];
        }
    }

    /// A⁻¹ b in the original ordering.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.sym.perm.iter().map(|&v| b[v]).collect();
        self.lower_solve(&mut y);
        self.upper_solve(&mut y);
        let mut out = vec![0.0; self.sym.n];
        for (k, &v) in self.sym.perm.iter().enumerate() {
            out[v] = y[k];
        }
        out
    }

    /// Pᵀ L⁻ᵀ z: maps a standard normal vector to a N(0, A⁻¹) draw.
    pub fn color(&self, z: &[f64]) -> Vec<f64> {
        let mut y = z.to_vec();
        self.upper_solve(&mut y);
        let mut out = vec![0.0; self.sym.n];
        for (k, &v) in self.sym.perm.iter().enumerate() {
            out[v] = y[k];
        }
        out
    }

    pub fn log_det(&self) -> f64 {
        let lp = &self.sym.l_ptr;
        2.0 * (0..self.sym.n).map(|j| self.l_val[lp[j]].ln()).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SymCsc {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        SymCsc::from_triplets(n, &t)
    }

    #[test]
    fn path_inverse_matches_closed_form() {
        let n = 150;
        let a = laplacian_1d(n);
        let sym = Arc::new(Symbolic::analyze(&a));
        let f = Cholesky::factor(sym, &a).unwrap();
        // (A⁻¹)_{ij} = min(i,j)(n+1-max(i,j))/(n+1), 1-based
        for &(i, j) in &[(0, 0), (3, 70), (149, 149), (80, 10)] {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let x = f.solve(&e);
            let (a1, b1) = ((i.min(j) + 1) as f64, (i.max(j) + 1) as f64);
            let exact = a1 * (n as f64 + 1.0 - b1) / (n as f64 + 1.0);
            assert!((x[i] - exact).abs() < 1e-9 * exact.max(1.0));
        }
        assert!((f.log_det() - ((n + 1) as f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn indefinite_is_rejected() {
        let a = SymCsc::from_triplets(2, &[(0, 0, 1.0), (1, 1, 1.0), (0, 1, 2.0)]);
        let sym = Arc::new(Symbolic::analyze(&a));
        assert!(matches!(Cholesky::factor(sym, &a), Err(Error::SingularPrecision { .. })));
    }
}
