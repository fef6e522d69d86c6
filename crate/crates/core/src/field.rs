//! Weighted Gaussian free fields: precision assembly, variances, resistances, exact samples.

use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::graph::{FunctionalModel, Target};
use crate::linalg::{conjugate_gradient, Cholesky, SymCsc, Symbolic};

/// Above this many unknowns the iterative solver is used.
pub const DIRECT_MAX_DOF: usize = 20_000;
/// Above this predicted factorization work the iterative solver is used.
pub const DIRECT_MAX_FLOPS: f64 = 1e9;
pub const CG_TOL: f64 = 1e-12;

/// ξ_e per functional; `f64::INFINITY` removes the functional.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceAssignment(Vec<f64>);

impl ResistanceAssignment {
    pub fn new(xi: Vec<f64>) -> Result<Self> {
        if let Some(e) = xi.iter().position(|&x| !(x > 0.0)) {
            return Err(invalid("xi", format!("entry {e} is {} (must be > 0)", xi[e])));
        }
        Ok(ResistanceAssignment(xi))
    }

    pub fn uniform(m: usize, value: f64) -> Self {
        Self::new(vec![value; m]).expect("positive")
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        ResistanceAssignment(self.0.iter().map(|x| x * c).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverPolicy {
    Auto,
    Direct,
    Iterative,
}

/// Sparsity pattern of F(ξ) for one model, with per-functional slot lists.
#[derive(Debug)]
pub struct PrecisionPattern {
    pub(crate) csc: SymCsc,
    ptr: Vec<usize>,
    slots: Vec<(usize, f64)>,
    symbolic: OnceLock<Arc<Symbolic>>,
}

impl PrecisionPattern {
    pub(crate) fn new(model: &FunctionalModel) -> Self {
        let fs = model.functionals();
        let pairs = fs.iter().flat_map(|f| {
            f.entries.iter().flat_map(move |&(i, _)| f.entries.iter().map(move |&(k, _)| (i, k)))
        });
        let csc = SymCsc::pattern(model.dof(), pairs);
        let mut ptr = vec![0];
        let mut slots = Vec::new();
        for f in fs {
            for (a, &(i, ci)) in f.entries.iter().enumerate() {
                for &(k, ck) in &f.entries[a..] {
                    slots.push((csc.slot(i, k).expect("slot"), ci * ck));
                }
            }
            ptr.push(slots.len());
        }
        PrecisionPattern { csc, ptr, slots, symbolic: OnceLock::new() }
    }

    pub(crate) fn symbolic(&self) -> Arc<Symbolic> {
        self.symbolic.get_or_init(|| Arc::new(Symbolic::analyze(&self.csc))).clone()
    }
}

#[derive(Debug, Clone)]
enum Solver {
    Direct(Cholesky),
    Iterative,
}

/// F(ξ) = Σ_e ξ_e⁻² y_e y_eᵀ with a factorization or an iterative fallback.
#[derive(Debug, Clone)]
pub struct PrecisionMatrix {
    matrix: SymCsc,
    solver: Solver,
}

pub fn assemble_matrix(model: &FunctionalModel, xi: &ResistanceAssignment) -> Result<SymCsc> {
    if xi.len() != model.functional_count() {
        return Err(invalid("xi", format!("expected {} entries, got {}", model.functional_count(), xi.len())));
    }
    let pat = model.pattern();
    let mut m = pat.csc.clone();
    for (e, &x) in xi.values().iter().enumerate() {
        if x.is_infinite() || model.is_forced_infinite(e) {
            continue;
        }
        let w = 1.0 / (x * x);
        for &(s, c) in &pat.slots[pat.ptr[e]..pat.ptr[e + 1]] {
            m.values[s] += w * c;
        }
    }
    Ok(m)
}

pub fn assemble_precision(model: &FunctionalModel, xi: &ResistanceAssignment) -> Result<PrecisionMatrix> {
    assemble_precision_with(model, xi, SolverPolicy::Auto)
}

pub fn assemble_precision_with(
    model: &FunctionalModel,
    xi: &ResistanceAssignment,
    policy: SolverPolicy,
) -> Result<PrecisionMatrix> {
    let matrix = assemble_matrix(model, xi)?;
    let direct = match policy {
        SolverPolicy::Direct => true,
        SolverPolicy::Iterative => false,
        SolverPolicy::Auto => {
            model.dof() <= DIRECT_MAX_DOF && model.pattern().symbolic().flops() <= DIRECT_MAX_FLOPS
        }
    };
    let solver = if direct {
        Solver::Direct(Cholesky::factor(model.pattern().symbolic(), &matrix)?)
    } else {
        if matrix.diagonal().iter().any(|&d| d <= 0.0) {
            let pivot = matrix.diagonal().iter().position(|&d| d <= 0.0).unwrap();
            return Err(Error::SingularPrecision { pivot });
        }
        Solver::Iterative
    };
    Ok(PrecisionMatrix { matrix, solver })
}

impl PrecisionMatrix {
    pub fn dof(&self) -> usize {
        self.matrix.n
    }

    pub fn matrix(&self) -> &SymCsc {
        &self.matrix
    }

    pub fn is_direct(&self) -> bool {
        matches!(self.solver, Solver::Direct(_))
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match &self.solver {
            Solver::Direct(c) => Ok(c.solve(b)),
            Solver::Iterative => {
                let out = conjugate_gradient(&self.matrix, b, CG_TOL, 20 * self.dof() + 1000);
                if out.converged {
                    Ok(out.x)
                } else {
                    Err(Error::NoConvergence { solver: "cg", iterations: out.iterations, residual: out.residual })
                }
            }
        }
    }

    /// ⟨y, F⁻¹ y⟩ for y over the free coordinates.
    pub fn quadratic_form(&self, y: &[f64]) -> Result<f64> {
        let x = self.solve(y)?;
        Ok(x.iter().zip(y).map(|(a, b)| a * b).sum())
    }

    /// (F⁻¹)_{ii} for a free coordinate.
    pub fn variance_dof(&self, i: usize) -> Result<f64> {
        let mut e = vec![0.0; self.dof()];
        e[i] = 1.0;
        Ok(self.solve(&e)?[i])
    }

    pub fn log_det(&self) -> Option<f64> {
        match &self.solver {
            Solver::Direct(c) => Some(c.log_det()),
            Solver::Iterative => None,
        }
    }

    /// One exact draw of N(0, F⁻¹) over the free coordinates.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        match &self.solver {
            Solver::Direct(c) => {
                let z: Vec<f64> = (0..self.dof()).map(|_| rng.sample(StandardNormal)).collect();
                Ok(c.color(&z))
            }
            Solver::Iterative => Err(Error::Unsupported("exact sampling needs a direct factorization".into())),
        }
    }

    pub fn to_matrix_market(&self) -> String {
        self.matrix.to_matrix_market()
    }
}

/// One exact draw of N(0, F(ξ)⁻¹): Cholesky coloring when factored, otherwise
/// F⁻¹ Σ_e ξ_e⁻¹ z_e y_e by conjugate gradients.
pub fn sample_field<R: Rng + ?Sized>(
    model: &FunctionalModel,
    xi: &ResistanceAssignment,
    p: &PrecisionMatrix,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if p.is_direct() {
        return p.sample(rng);
    }
    let mut b = vec![0.0; p.dof()];
    for (e, f) in model.functionals().iter().enumerate() {
        let x = xi.values()[e];
        if x.is_infinite() || model.is_forced_infinite(e) {
            continue;
        }
        let w = rng.sample::<f64, _>(StandardNormal) / x;
        for &(i, c) in &f.entries {
            b[i] += w * c;
        }
    }
    p.solve(&b)
}

/// Var φ(site); zero on pinned sites.
pub fn variance(model: &FunctionalModel, p: &PrecisionMatrix, site: usize) -> Result<f64> {
    if site >= model.site_count() {
        return Err(invalid("v", format!("site {site} out of range")));
    }
    match model.dof_of_site(site) {
        Some(i) => p.variance_dof(i),
        None => Ok(0.0),
    }
}

pub fn sample_gff<R: Rng + ?Sized>(p: &PrecisionMatrix, rng: &mut R, count: usize) -> Result<Vec<Vec<f64>>> {
    (0..count).map(|_| p.sample(rng)).collect()
}

/// R(v ↔ w) in G_Λ with edge resistances ξ_e².
pub fn effective_resistance(
    model: &FunctionalModel,
    xi: &ResistanceAssignment,
    v: usize,
    w: Target,
) -> Result<f64> {
    let g = model
        .network()
        .ok_or_else(|| Error::Unsupported("effective resistance needs a gradient model".into()))?;
    if xi.len() != g.edge_count() {
        return Err(invalid("xi", "length differs from the edge count"));
    }
    let r: Vec<f64> = xi
        .values()
        .iter()
        .enumerate()
        .map(|(e, &x)| if model.is_forced_infinite(e) { f64::INFINITY } else { x * x })
        .collect();
    let target = match w {
        Target::Boundary => model.ground_vertex(),
        Target::Site(s) => s,
    };
    g.effective_resistance(&r, v, target)
}
