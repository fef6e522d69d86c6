use std::collections::HashSet;

use serde::Serialize;

use super::lattice::{box_graph, BoxIndex};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Serialize)]
pub struct PartitionPart {
    /// Coordinate direction, 1-based.
    pub i: usize,
    pub eta: i64,
    pub path: Vec<Vec<i64>>,
    pub endpoint: Vec<i64>,
    /// Edge ids of `box_graph(d, L)`: path edges then induced orthant edges.
    pub edges: Vec<usize>,
    pub orthant_vertices: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionSpec {
    pub d: usize,
    pub radius: usize,
    pub parts: Vec<PartitionPart>,
}

/// Signed unit step used at step k of the path for direction i (both 1-based).
fn step(d: usize, i: usize, k: usize) -> (usize, i64) {
    let jh = (k - 1) % d + 1;
    let sign = if i <= jh { 1 } else { -1 };
    (jh - 1, sign)
}

/// Path P_{i,η} from the origin to its corner endpoint in {±1}^d.
pub fn transience_path(d: usize, i: usize, eta: i64) -> Vec<Vec<i64>> {
    let mut p = vec![vec![0i64; d]];
    for m in 0..d {
        let (axis, sign) = step(d, i, i + m);
        let mut v = p.last().unwrap().clone();
        v[axis] += eta * sign;
        p.push(v);
    }
    p
}

pub fn strong_transience_partition(d: usize, l: usize) -> Result<PartitionSpec> {
    if d <= 2 {
        return Err(invalid("d", "partition needs d >= 3"));
    }
    if l == 0 {
        return Err(invalid("L", "partition needs L >= 1"));
    }
    let g = box_graph(d, l);
    let b = BoxIndex::new(d, l);
    let lookup: std::collections::HashMap<(usize, usize), usize> =
        g.edges().iter().enumerate().map(|(id, &(a, c))| ((a.min(c), a.max(c)), id)).collect();
    let mut parts = Vec::with_capacity(2 * d);
    for i in 1..=d {
        for eta in [1i64, -1] {
            let path = transience_path(d, i, eta);
            let w = path.last().unwrap().clone();
            let mut edges = Vec::new();
            for s in path.windows(2) {
                let (a, c) = (b.index(&s[0]).unwrap(), b.index(&s[1]).unwrap());
                edges.push(lookup[&(a.min(c), a.max(c))]);
            }
            let inside: HashSet<usize> = (0..b.len())
                .filter(|&v| b.coords(v).iter().zip(&w).all(|(x, s)| x * s >= 1))
                .collect();
            for (id, &(a, c)) in g.edges().iter().enumerate() {
                if inside.contains(&a) && inside.contains(&c) {
                    edges.push(id);
                }
            }
            parts.push(PartitionPart { i, eta, path, endpoint: w, edges, orthant_vertices: inside.len() });
        }
    }
    Ok(PartitionSpec { d, radius: l, parts })
}
