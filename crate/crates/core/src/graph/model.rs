use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{invalid, Error, Result};
use crate::field::PrecisionPattern;
use crate::linalg::{Cholesky, SymCsc, Symbolic};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Boundary {
    Wired,
    FreePinned {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v0: Option<Vec<i64>>,
    },
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalLabel {
    Edge,
    BoundaryEdge,
    LaplacianRow,
    GradientRow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    /// (dof index, coefficient), sorted by dof.
    pub entries: Vec<(usize, f64)>,
    pub label: FunctionalLabel,
    /// Edge id of the source graph or vertex id of the Laplacian row.
    pub origin: usize,
    /// Endpoints in the resistor network, when the functional is a gradient.
    pub ends: Option<(usize, usize)>,
}

impl Functional {
    pub fn apply(&self, phi: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, c)| c * phi[i]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Boundary,
    Site(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropMode {
    Delete,
    InfiniteResistance,
}

#[derive(Debug, Clone)]
pub struct FunctionalModel {
    pub(crate) dim: usize,
    pub(crate) radius: usize,
    pub(crate) boundary: Boundary,
    pub(crate) order: usize,
    pub(crate) is_tree: bool,
    pub(crate) sites: Vec<Vec<i64>>,
    pub(crate) site_dof: Vec<Option<usize>>,
    pub(crate) dof_site: Vec<usize>,
    pub(crate) functionals: Vec<Functional>,
    pub(crate) network_vertices: Option<usize>,
    pub(crate) ground: usize,
    pub(crate) forced_infinite: Vec<bool>,
    pub(crate) pattern: OnceLock<Arc<PrecisionPattern>>,
}

#[derive(Debug, Serialize)]
pub struct ModelExport {
    pub dim: usize,
    pub radius: usize,
    pub boundary: Boundary,
    pub j: usize,
    pub vertices: Vec<Vec<i64>>,
    pub functionals: Vec<FunctionalExport>,
}

#[derive(Debug, Serialize)]
pub struct FunctionalExport {
    pub id: usize,
    pub label: FunctionalLabel,
    pub entries: Vec<(usize, f64)>,
}

impl FunctionalModel {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        dim: usize,
        radius: usize,
        boundary: Boundary,
        order: usize,
        sites: Vec<Vec<i64>>,
        pinned: Option<usize>,
        functionals: Vec<Functional>,
        network_vertices: Option<usize>,
        ground: usize,
    ) -> Result<Self> {
        let m = Self::assemble_unchecked(dim, radius, boundary, order, sites, pinned, functionals, network_vertices, ground)?;
        m.check_span()?;
        Ok(m)
    }

    /// For families whose functionals are known to span, such as Δ^j on a wired box.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble_unchecked(
        dim: usize,
        radius: usize,
        boundary: Boundary,
        order: usize,
        sites: Vec<Vec<i64>>,
        pinned: Option<usize>,
        functionals: Vec<Functional>,
        network_vertices: Option<usize>,
        ground: usize,
    ) -> Result<Self> {
        let mut site_dof = vec![None; sites.len()];
        let mut dof_site = Vec::with_capacity(sites.len());
        for s in 0..sites.len() {
            if Some(s) != pinned {
                site_dof[s] = Some(dof_site.len());
                dof_site.push(s);
            }
        }
        if dof_site.is_empty() {
            return Err(invalid("L", "model has no free coordinates"));
        }
        let m = FunctionalModel {
            dim,
            radius,
            boundary,
            order,
            is_tree: false,
            sites,
            site_dof,
            dof_site,
            forced_infinite: vec![false; functionals.len()],
            functionals,
            network_vertices,
            ground,
            pattern: OnceLock::new(),
        };
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn radius(&self) -> usize {
        self.radius
    }
    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn is_tree(&self) -> bool {
        self.is_tree
    }

    /// Number of vertices of Λ (pinned vertices included).
    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    /// Number of free field coordinates.
    pub fn dof(&self) -> usize {
        self.dof_site.len()
    }

    pub fn site_coords(&self, site: usize) -> &[i64] {
        &self.sites[site]
    }

    pub fn site_of(&self, coords: &[i64]) -> Option<usize> {
        self.sites.iter().position(|c| c == coords)
    }

    /// Site at the lattice origin; the root of a tree and site 0 of a general graph.
    pub fn origin_site(&self) -> usize {
        if self.is_tree {
            0
        } else {
            self.site_of(&vec![0; self.dim]).unwrap_or(0)
        }
    }

    pub fn dof_of_site(&self, site: usize) -> Option<usize> {
        self.site_dof[site]
    }

    pub fn site_of_dof(&self, dof: usize) -> usize {
        self.dof_site[dof]
    }

    pub fn functionals(&self) -> &[Functional] {
        &self.functionals
    }

    pub fn functional_count(&self) -> usize {
        self.functionals.len()
    }

    pub fn is_forced_infinite(&self, e: usize) -> bool {
        self.forced_infinite[e]
    }

    /// Resistor network G_Λ; edge ids coincide with functional ids.
    pub fn network(&self) -> Option<Graph> {
        let n = self.network_vertices?;
        let edges = self.functionals.iter().map(|f| f.ends.expect("gradient functional")).collect();
        Some(Graph::new(n, edges).expect("valid network"))
    }

    /// Network vertex standing for the pinned boundary (z_Λ or v₀).
    pub fn ground_vertex(&self) -> usize {
        self.ground
    }

    /// Field values over all sites (pinned sites read 0).
    pub fn to_sites(&self, phi: &[f64]) -> Vec<f64> {
        self.site_dof.iter().map(|d| d.map_or(0.0, |i| phi[i])).collect()
    }

    pub(crate) fn pattern(&self) -> Arc<PrecisionPattern> {
        self.pattern.get_or_init(|| Arc::new(PrecisionPattern::new(self))).clone()
    }

    fn check_span(&self) -> Result<()> {
        if let Some(n) = self.network_vertices {
            if self.functionals.iter().all(|f| f.ends.is_some()) {
                return self.check_grounded(n);
            }
        }
        let mut trips = Vec::new();
        for (e, f) in self.functionals.iter().enumerate() {
            if self.forced_infinite[e] {
                continue;
            }
            for &(i, a) in &f.entries {
                for &(k, b) in &f.entries {
                    if i <= k {
                        trips.push((i, k, a * b));
                    }
                }
            }
        }
        let f1 = SymCsc::from_triplets(self.dof(), &trips);
        let sym = Arc::new(Symbolic::analyze(&f1));
        Cholesky::factor(sym, &f1).map(|_| ()).map_err(|_| Error::SpanLost)
    }

    /// Gradient functionals span iff every free site is joined to the ground.
    fn check_grounded(&self, n: usize) -> Result<()> {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (e, f) in self.functionals.iter().enumerate() {
            if !self.forced_infinite[e] {
                let (a, b) = f.ends.expect("checked");
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let g = find(&mut parent, self.ground);
        for (s, d) in self.site_dof.iter().enumerate() {
            if d.is_some() && find(&mut parent, s) != g {
                return Err(Error::SpanLost);
            }
        }
        Ok(())
    }

    /// Removes (or forces ξ = ∞ on) every functional with `keep(id) == false`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool, mode: DropMode) -> Result<FunctionalModel> {
        let mut out = self.clone();
        out.pattern = OnceLock::new();
        match mode {
            DropMode::Delete => {
                let mut fs = Vec::new();
                let mut inf = Vec::new();
                for (e, f) in self.functionals.iter().enumerate() {
                    if keep(e) {
                        fs.push(f.clone());
                        inf.push(self.forced_infinite[e]);
                    }
                }
                out.functionals = fs;
                out.forced_infinite = inf;
            }
            DropMode::InfiniteResistance => {
                for e in 0..self.functionals.len() {
                    if !keep(e) {
                        out.forced_infinite[e] = true;
                    }
                }
            }
        }
        out.check_span()?;
        Ok(out)
    }

    pub fn export(&self) -> ModelExport {
        ModelExport {
            dim: self.dim,
            radius: self.radius,
            boundary: self.boundary.clone(),
            j: self.order,
            vertices: self.dof_site.iter().map(|&s| self.sites[s].clone()).collect(),
            functionals: self
                .functionals
                .iter()
                .enumerate()
                .map(|(id, f)| FunctionalExport { id, label: f.label, entries: f.entries.clone() })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.export()).expect("serializable")
    }

    /// F(1) = Σ y_e y_eᵀ as a dense matrix (small models only).
    pub fn unit_precision_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dof();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for (e, f) in self.functionals.iter().enumerate() {
            if self.forced_infinite[e] {
                continue;
            }
            for &(i, a) in &f.entries {
                for &(k, b) in &f.entries {
                    m[(i, k)] += a * b;
                }
            }
        }
        m
    }
}
