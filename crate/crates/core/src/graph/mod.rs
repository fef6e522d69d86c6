//! Graphs, lattice boxes, trees and the linear-functional models built on them.

mod lattice;
mod model;
mod partition;

pub use lattice::{box_graph, build_lattice_box, build_tree, build_wired, wired_box_edge_keys, BoxIndex};
pub use model::{Boundary, DropMode, Functional, FunctionalLabel, FunctionalModel, ModelExport, Target};
pub use partition::{strong_transience_partition, transience_path, PartitionPart, PartitionSpec};

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, SymCsc, Symbolic};

/// Undirected multigraph with dense vertex and edge ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    coords: Option<Vec<Vec<i64>>>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(crate::error::invalid("edges", format!("endpoint out of range in ({a}, {b})")));
            }
        }
        Ok(Graph { n, edges, coords: None })
    }

    pub fn with_coords(mut self, coords: Vec<Vec<i64>>) -> Self {
        assert_eq!(coords.len(), self.n);
        self.coords = Some(coords);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn coords(&self) -> Option<&[Vec<i64>]> {
        self.coords.as_deref()
    }

    /// Incident (neighbour, edge id) lists.
    pub fn incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut inc = vec![Vec::new(); self.n];
        for (id, &(a, b)) in self.edges.iter().enumerate() {
            inc[a].push((b, id));
            if a != b {
                inc[b].push((a, id));
            }
        }
        inc
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Component label per vertex, counting only edges with `open[id]`.
    pub fn components(&self, open: impl Fn(usize) -> bool) -> Vec<usize> {
        let inc = self.incidence();
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for &(w, id) in &inc[v] {
                    if label[w] == usize::MAX && open(id) {
                        label[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components(|_| true).iter().all(|&c| c == 0)
    }

    /// Effective resistance between `v` and `w` with per-edge resistances;
    /// infinite entries are absent edges.
    pub fn effective_resistance(&self, resistance: &[f64], v: usize, w: usize) -> Result<f64> {
        assert_eq!(resistance.len(), self.edges.len());
        if v == w {
            return Err(crate::error::invalid("w", "endpoints must differ"));
        }
        let comp = self.components(|id| resistance[id].is_finite());
        if comp[v] != comp[w] {
            return Err(Error::Disconnected(v, w));
        }
        // unknowns: component of v minus the ground w
        let mut idx = vec![usize::MAX; self.n];
        let mut m = 0;
        for u in 0..self.n {
            if comp[u] == comp[v] && u != w {
                idx[u] = m;
                m += 1;
            }
        }
        let mut trips = Vec::new();
        for (id, &(a, b)) in self.edges.iter().enumerate() {
            let r = resistance[id];
            if !r.is_finite() || a == b || comp[a] != comp[v] {
                continue;
            }
            let c = 1.0 / r;
            let (ia, ib) = (idx[a], idx[b]);
            if ia != usize::MAX {
                trips.push((ia, ia, c));
            }
            if ib != usize::MAX {
                trips.push((ib, ib, c));
            }
            if ia != usize::MAX && ib != usize::MAX {
                trips.push((ia, ib, -c));
            }
        }
        let lap = SymCsc::from_triplets(m, &trips);
        let sym = Arc::new(Symbolic::analyze(&lap));
        let chol = Cholesky::factor(sym, &lap)?;
        let mut e = vec![0.0; m];
        e[idx[v]] = 1.0;
        Ok(chol.solve(&e)[idx[v]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_parallel() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        assert!((g.effective_resistance(&[1.0], 0, 1).unwrap() - 1.0).abs() < 1e-14);
        let g = Graph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        assert!((g.effective_resistance(&[1.0, 1.0], 0, 1).unwrap() - 0.5).abs() < 1e-14);
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert!((g.effective_resistance(&[1.0, 2.0], 0, 2).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(g.effective_resistance(&[1.0, f64::INFINITY], 0, 2), Err(Error::Disconnected(0, 2)));
    }
}
