use std::collections::BTreeMap;

use super::model::{Boundary, Functional, FunctionalLabel, FunctionalModel};
use super::Graph;
use crate::error::{invalid, Error, Result};

/// Row-major indexing of [-r..r]^d.
#[derive(Debug, Clone, Copy)]
pub struct BoxIndex {
    pub d: usize,
    pub r: i64,
    pub side: usize,
}

impl BoxIndex {
    pub fn new(d: usize, r: usize) -> Self {
        BoxIndex { d, r: r as i64, side: 2 * r + 1 }
    }

    pub fn len(&self) -> usize {
        self.side.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn stride(&self, k: usize) -> usize {
        self.side.pow((self.d - 1 - k) as u32)
    }

    pub fn coords(&self, mut idx: usize) -> Vec<i64> {
        let mut c = vec![0; self.d];
        for k in (0..self.d).rev() {
            c[k] = (idx % self.side) as i64 - self.r;
            idx /= self.side;
        }
        c
    }

    pub fn index(&self, c: &[i64]) -> Option<usize> {
        let mut idx = 0;
        for &x in c {
            if x.abs() > self.r {
                return None;
            }
            idx = idx * self.side + (x + self.r) as usize;
        }
        Some(idx)
    }
}

/// Nearest-neighbour graph induced on [-L..L]^d, with coordinates.
pub fn box_graph(d: usize, l: usize) -> Graph {
    let b = BoxIndex::new(d, l);
    let mut edges = Vec::new();
    for v in 0..b.len() {
        let c = b.coords(v);
        for k in 0..d {
            if c[k] < b.r {
                edges.push((v, v + b.stride(k)));
            }
        }
    }
    let coords = (0..b.len()).map(|v| b.coords(v)).collect();
    Graph::new(b.len(), edges).expect("valid box").with_coords(coords)
}

fn two_point(a: usize, b: usize, dof: &[Option<usize>], origin: usize, ends: (usize, usize)) -> Option<Functional> {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let mut entries = Vec::new();
    if let Some(i) = dof[lo] {
        entries.push((i, 1.0));
    }
    if let Some(i) = dof[hi] {
        entries.push((i, -1.0));
    }
    if entries.is_empty() {
        return None;
    }
    entries.sort_by_key(|e| e.0);
    let label = FunctionalLabel::Edge;
    Some(Functional { entries, label, origin, ends: Some(ends) })
}

pub fn build_lattice_box(d: usize, l: usize, boundary: Boundary, j: usize) -> Result<FunctionalModel> {
    if d == 0 {
        return Err(invalid("d", "dimension must be at least 1"));
    }
    if j == 0 {
        return Err(invalid("j", "Laplacian order must be at least 1"));
    }
    if j >= 2 && boundary != Boundary::Wired {
        return Err(Error::Unsupported(format!("j = {j} requires wired boundary")));
    }
    let b = BoxIndex::new(d, l);
    let n = b.len();
    let sites: Vec<Vec<i64>> = (0..n).map(|v| b.coords(v)).collect();
    match &boundary {
        Boundary::Wired if j == 1 => {
            let z = n;
            let dof: Vec<Option<usize>> = (0..n).map(Some).collect();
            let mut fs = Vec::new();
            for v in 0..n {
                let c = &sites[v];
                for k in 0..d {
                    if c[k] == -b.r {
                        let id = fs.len();
                        fs.push(Functional {
                            entries: vec![(v, 1.0)],
                            label: FunctionalLabel::BoundaryEdge,
                            origin: id,
                            ends: Some((v, z)),
                        });
                    }
                    let id = fs.len();
                    if c[k] < b.r {
                        let w = v + b.stride(k);
                        fs.push(two_point(v, w, &dof, id, (v, w)).expect("interior edge"));
                    } else {
                        fs.push(Functional {
                            entries: vec![(v, 1.0)],
                            label: FunctionalLabel::BoundaryEdge,
                            origin: id,
                            ends: Some((v, z)),
                        });
                    }
                }
            }
            FunctionalModel::assemble(d, l, boundary, 1, sites, None, fs, Some(n + 1), z)
        }
        Boundary::Wired => {
            let fs = iterated_laplacian_functionals(&b, j);
            FunctionalModel::assemble_unchecked(d, l, boundary, j, sites, None, fs, None, n)
        }
        Boundary::FreePinned { v0 } => {
            let v0c = v0.clone().unwrap_or_else(|| vec![0; d]);
            if v0c.len() != d {
                return Err(invalid("v0", format!("expected {d} coordinates")));
            }
            let p = b.index(&v0c).ok_or_else(|| invalid("v0", format!("{v0c:?} lies outside the box")))?;
            let dof = dof_map(n, p);
            let mut fs = Vec::new();
            for v in 0..n {
                for k in 0..d {
                    if sites[v][k] < b.r {
                        let w = v + b.stride(k);
                        let id = fs.len();
                        fs.extend(two_point(v, w, &dof, id, (v, w)));
                    }
                }
            }
            let boundary = Boundary::FreePinned { v0: Some(v0c) };
            FunctionalModel::assemble(d, l, boundary, 1, sites, Some(p), fs, Some(n), p)
        }
        Boundary::Torus => {
            if l == 0 {
                return Err(invalid("L", "torus needs L >= 1"));
            }
            let p = b.index(&vec![0; d]).expect("origin");
            let dof = dof_map(n, p);
            let mut fs = Vec::new();
            for v in 0..n {
                let c = &sites[v];
                for k in 0..d {
                    let mut c2 = c.clone();
                    c2[k] = if c[k] == b.r { -b.r } else { c[k] + 1 };
                    let w = b.index(&c2).expect("in box");
                    let id = fs.len();
                    fs.extend(two_point(v, w, &dof, id, (v, w)));
                }
            }
            FunctionalModel::assemble(d, l, boundary, 1, sites, Some(p), fs, Some(n), p)
        }
    }
}

fn dof_map(n: usize, pinned: usize) -> Vec<Option<usize>> {
    (0..n).map(|v| if v == pinned { None } else if v < pinned { Some(v) } else { Some(v - 1) }).collect()
}

/// Stencil of Δ^m applied to a unit mass at the origin, Δφ(x) = Σ_{y~x} (φ(x) - φ(y)).
fn laplacian_power_stencil(d: usize, m: usize) -> Vec<(Vec<i64>, f64)> {
    let mut cur: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    cur.insert(vec![0; d], 1.0);
    for _ in 0..m {
        let mut next = BTreeMap::new();
        for (x, &v) in &cur {
            *next.entry(x.clone()).or_insert(0.0) += 2.0 * d as f64 * v;
            for k in 0..d {
                for s in [-1, 1] {
                    let mut y = x.clone();
                    y[k] += s;
                    *next.entry(y).or_insert(0.0) -= v;
                }
            }
        }
        next.retain(|_, v: &mut f64| *v != 0.0);
        cur = next;
    }
    cur.into_iter().collect()
}

fn iterated_laplacian_functionals(b: &BoxIndex, j: usize) -> Vec<Functional> {
    let d = b.d;
    let m = j / 2;
    let stencil = laplacian_power_stencil(d, m);
    let row = |w: &[i64]| -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for (off, c) in &stencil {
            let x: Vec<i64> = w.iter().zip(off).map(|(a, b)| a + b).collect();
            if let Some(i) = b.index(&x) {
                *out.entry(i).or_insert(0.0) += c;
            }
        }
        out
    };
    let mut fs = Vec::new();
    if j % 2 == 0 {
        let big = BoxIndex::new(d, b.r as usize + m);
        for w in 0..big.len() {
            let r = row(&big.coords(w));
            if !r.is_empty() {
                fs.push(Functional {
                    entries: r.into_iter().collect(),
                    label: FunctionalLabel::LaplacianRow,
                    origin: w,
                    ends: None,
                });
            }
        }
    } else {
        let big = BoxIndex::new(d, b.r as usize + m + 1);
        for w in 0..big.len() {
            let cw = big.coords(w);
            for k in 0..d {
                let mut cv = cw.clone();
                cv[k] += 1;
                let mut r = row(&cw);
                for (i, c) in row(&cv) {
                    *r.entry(i).or_insert(0.0) -= c;
                }
                r.retain(|_, c| *c != 0.0);
                if !r.is_empty() {
                    fs.push(Functional {
                        entries: r.into_iter().collect(),
                        label: FunctionalLabel::GradientRow,
                        origin: w * d + k,
                        ends: None,
                    });
                }
            }
        }
    }
    fs
}

/// Rooted truncation of the d-regular tree; vertices at depth h are wired.
pub fn build_tree(degree: usize, depth: usize) -> Result<FunctionalModel> {
    if degree <= 2 {
        return Err(invalid("degree", "tree degree must be at least 3"));
    }
    if depth == 0 {
        return Err(invalid("depth", "depth must be at least 1"));
    }
    let mut sites = vec![vec![0, 0]];
    let mut frontier = vec![0usize];
    let mut links: Vec<(usize, Option<usize>)> = Vec::new();
    for h in 1..=depth {
        let mut next = Vec::new();
        let mut k = 0;
        for &p in &frontier {
            let kids = if p == 0 { degree } else { degree - 1 };
            for _ in 0..kids {
                if h < depth {
                    let c = sites.len();
                    sites.push(vec![h as i64, k]);
                    links.push((p, Some(c)));
                    next.push(c);
                } else {
                    links.push((p, None));
                }
                k += 1;
            }
        }
        frontier = next;
    }
    let n = sites.len();
    let z = n;
    let fs = links
        .iter()
        .enumerate()
        .map(|(id, &(p, c))| match c {
            Some(c) => Functional {
                entries: vec![(p, 1.0), (c, -1.0)],
                label: FunctionalLabel::Edge,
                origin: id,
                ends: Some((p, c)),
            },
            None => Functional {
                entries: vec![(p, 1.0)],
                label: FunctionalLabel::BoundaryEdge,
                origin: id,
                ends: Some((p, z)),
            },
        })
        .collect();
    let mut m = FunctionalModel::assemble(degree, depth, Boundary::Wired, 1, sites, None, fs, Some(n + 1), z)?;
    m.is_tree = true;
    Ok(m)
}

/// Model on an arbitrary graph with the vertices flagged in `wired` contracted to z.
pub fn build_wired(graph: &Graph, wired: &[bool]) -> Result<FunctionalModel> {
    if wired.len() != graph.vertex_count() {
        return Err(invalid("wired", "one flag per vertex expected"));
    }
    let mut dof = vec![None; wired.len()];
    let mut sites = Vec::new();
    for v in 0..wired.len() {
        if !wired[v] {
            dof[v] = Some(sites.len());
            sites.push(vec![v as i64]);
        }
    }
    let z = sites.len();
    let mut fs = Vec::new();
    for &(a, b) in graph.edges() {
        let id = fs.len();
        match (dof[a], dof[b]) {
            (Some(i), Some(k)) if i != k => {
                let (lo, hi) = (i.min(k), i.max(k));
                fs.push(Functional {
                    entries: vec![(lo, 1.0), (hi, -1.0)],
                    label: FunctionalLabel::Edge,
                    origin: id,
                    ends: Some((lo, hi)),
                });
            }
            (Some(i), None) | (None, Some(i)) => fs.push(Functional {
                entries: vec![(i, 1.0)],
                label: FunctionalLabel::BoundaryEdge,
                origin: id,
                ends: Some((i, z)),
            }),
            _ => {}
        }
    }
    FunctionalModel::assemble(1, 0, Boundary::Wired, 1, sites, None, fs, Some(z + 1), z)
}

/// Geometric edge behind each functional of `build_lattice_box(d, l, Wired, 1)`, in
/// functional order: (lower endpoint, direction). Lower endpoints may lie one step outside.
pub fn wired_box_edge_keys(d: usize, l: usize) -> Vec<(Vec<i64>, usize)> {
    let b = BoxIndex::new(d, l);
    let mut keys = Vec::new();
    for v in 0..b.len() {
        let c = b.coords(v);
        for k in 0..d {
            if c[k] == -b.r {
                let mut lo = c.clone();
                lo[k] -= 1;
                keys.push((lo, k));
            }
            keys.push((c.clone(), k));
        }
    }
    keys
}
