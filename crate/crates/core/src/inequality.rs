//! Exhaustive and Monte Carlo checks of the determinant, association, domination
//! and convex-comparison inequalities on small mixtures.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::field::{assemble_precision, ResistanceAssignment};
use crate::graph::FunctionalModel;
use crate::potential::{MixtureKind, MixtureMeasure};
use crate::special::{integrate, log_sum_exp, normal_cdf};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub trials: usize,
    pub violations: usize,
    /// Smallest slack seen; negative beyond −tolerance counts as a violation.
    pub worst_margin: f64,
    pub tolerance: f64,
}

impl CheckReport {
    fn new(check: &str, tolerance: f64) -> Self {
        CheckReport { check: check.into(), trials: 0, violations: 0, worst_margin: f64::INFINITY, tolerance }
    }

    fn push(&mut self, margin: f64) {
        self.trials += 1;
        self.worst_margin = self.worst_margin.min(margin);
        if margin < -self.tolerance {
            self.violations += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn log_det_pd(m: &DMatrix<f64>) -> Option<f64> {
    let c = m.clone().cholesky()?;
    Some(2.0 * c.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// (det(A+B) det(A+C) − det(A+B+C) det(A)) relative to the sum of both magnitudes.
pub fn det_inequality_margin(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
    let rhs = (a + b).determinant() * (a + c).determinant();
    let lhs = (a + b + c).determinant() * a.determinant();
    let scale = rhs.abs() + lhs.abs();
    if scale == 0.0 { 0.0 } else { (rhs - lhs) / scale }
}

fn wishart<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, k, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    &g * g.transpose()
}

/// det(A+B+C) det(A) ≤ det(A+B) det(A+C) on random Wishart triples, A positive definite.
pub fn check_det_inequality<R: Rng + ?Sized>(n: usize, trials: usize, rng: &mut R) -> Result<CheckReport> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let mut rep = CheckReport::new("det-inequality", 1e-9);
    for _ in 0..trials {
        let a = wishart(n, n + 1 + rng.random_range(0..3), rng) + DMatrix::identity(n, n) * 1e-3;
        let b = wishart(n, rng.random_range(1..=n), rng);
        let c = wishart(n, rng.random_range(1..=n), rng);
        rep.push(det_inequality_margin(&a, &b, &c));
    }
    Ok(rep)
}

/// Ways to corrupt the mixing weights, used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NuMutation {
    None,
    /// det(F)^{+1/2} in place of det(F)^{−1/2}.
    DetExponentFlipped,
    /// Drops the ∏ ξ_e^{−1} factor.
    DropXiInverse,
    /// Product measure ∏ρ_e only.
    DropDeterminant,
}

/// Explicit mixing measure ν over a finite grid of ξ for n ≤ 4 and at most six functionals.
#[derive(Debug, Clone)]
pub struct SmallMixture {
    n: usize,
    functionals: Vec<DVector<f64>>,
    grids: Vec<Vec<(f64, f64)>>,
    atoms: Vec<Vec<usize>>,
    log_w: Vec<f64>,
    log_prior: Vec<f64>,
    mutation: NuMutation,
}

pub const MAX_ATOM_PAIRS: usize = 100_000;

impl SmallMixture {
    /// `grids[e]` lists (κ, ρ_e mass) for functional e.
    pub fn new(n: usize, functionals: Vec<Vec<f64>>, grids: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        if !(1..=4).contains(&n) {
            return Err(invalid("n", "must lie in 1..=4"));
        }
        if functionals.is_empty() || functionals.len() > 6 {
            return Err(invalid("functionals", "between 1 and 6 expected"));
        }
        if grids.len() != functionals.len() {
            return Err(invalid("grids", "one grid per functional"));
        }
        let mut fs = Vec::new();
        for f in &functionals {
            if f.len() != n {
                return Err(invalid("functionals", format!("vectors must have length {n}")));
            }
            fs.push(DVector::from_column_slice(f));
        }
        let mut gs = Vec::new();
        for g in &grids {
            if g.is_empty() || g.iter().any(|&(k, w)| !(k > 0.0) || !k.is_finite() || !(w > 0.0)) {
                return Err(invalid("grids", "atoms need κ > 0 and positive mass"));
            }
            let total: f64 = g.iter().map(|a| a.1).sum();
            let mut g: Vec<(f64, f64)> = g.iter().map(|&(k, w)| (k, w / total)).collect();
            g.sort_by(|a, b| a.0.total_cmp(&b.0));
            if g.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(invalid("grids", "repeated κ atom"));
            }
            gs.push(g);
        }
        let count: usize = gs.iter().map(Vec::len).product();
        if count * count > 2 * MAX_ATOM_PAIRS {
            return Err(invalid("grids", format!("{count} atoms exceed the enumeration budget")));
        }
        let mut atoms = Vec::with_capacity(count);
        for mut code in 0..count {
            let mut t = Vec::with_capacity(gs.len());
            for g in &gs {
                t.push(code % g.len());
                code /= g.len();
            }
            atoms.push(t);
        }
        let mut sm = SmallMixture {
            n,
            functionals: fs,
            grids: gs,
            atoms,
            log_w: Vec::new(),
            log_prior: Vec::new(),
            mutation: NuMutation::None,
        };
        sm.reweigh()?;
        Ok(sm)
    }

    /// All functionals share the two-point law κ ∈ {k1, k2} with P(k1) = w.
    pub fn two_point(n: usize, functionals: Vec<Vec<f64>>, k1: f64, k2: f64, w: f64) -> Result<Self> {
        let g = vec![(k1, w), (k2, 1.0 - w)];
        let m = functionals.len();
        Self::new(n, functionals, vec![g; m])
    }

    fn reweigh(&mut self) -> Result<()> {
        let mut lw = Vec::with_capacity(self.atoms.len());
        let mut lp = Vec::with_capacity(self.atoms.len());
        for i in 0..self.atoms.len() {
            let xi = self.xi(i);
            let ld = log_det_pd(&self.precision(&xi))
                .ok_or_else(|| invalid("functionals", "F(ξ) is singular; functionals must span"))?;
            let prior: f64 = self.atoms[i].iter().zip(&self.grids).map(|(&k, g)| g[k].1.ln()).sum();
            let inv: f64 = -xi.iter().map(|x| x.ln()).sum::<f64>();
            let w = match self.mutation {
                NuMutation::None => -0.5 * ld + inv + prior,
                NuMutation::DetExponentFlipped => 0.5 * ld + inv + prior,
                NuMutation::DropXiInverse => -0.5 * ld + prior,
                NuMutation::DropDeterminant => prior,
            };
            lw.push(w);
            lp.push(prior);
        }
        let z = log_sum_exp(&lw);
        self.log_w = lw.into_iter().map(|w| w - z).collect();
        let z = log_sum_exp(&lp);
        self.log_prior = lp.into_iter().map(|w| w - z).collect();
        Ok(())
    }

    pub fn with_mutation(&self, mutation: NuMutation) -> Self {
        let mut out = self.clone();
        out.mutation = mutation;
        out.reweigh().expect("already validated");
        out
    }

    /// Multiplies ν by f(ξ) ≥ 0 and renormalizes.
    pub fn reweighted(&self, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut out = self.clone();
        let lw: Vec<f64> = (0..self.atoms.len()).map(|i| self.log_w[i] + f(&self.xi(i)).ln()).collect();
        let z = log_sum_exp(&lw);
        out.log_w = lw.into_iter().map(|w| w - z).collect();
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn functional_count(&self) -> usize {
        self.functionals.len()
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn xi(&self, i: usize) -> Vec<f64> {
        self.atoms[i].iter().zip(&self.grids).map(|(&k, g)| g[k].0).collect()
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.log_w[i].exp()
    }

    pub fn log_weight(&self, i: usize) -> f64 {
        self.log_w[i]
    }

    pub fn prior_weight(&self, i: usize) -> f64 {
        self.log_prior[i].exp()
    }

    /// F(ξ) = Σ ξ_e^{−2} y_e y_eᵀ.
    pub fn precision(&self, xi: &[f64]) -> DMatrix<f64> {
        let mut f = DMatrix::zeros(self.n, self.n);
        for (y, &x) in self.functionals.iter().zip(xi) {
            f += y * y.transpose() / (x * x);
        }
        f
    }

    pub fn covariance(&self, i: usize) -> DMatrix<f64> {
        self.precision(&self.xi(i)).try_inverse().expect("positive definite")
    }

    /// ⟨y, F(ξ)^{−1} y⟩.
    pub fn q(&self, xi: &[f64], y: &[f64]) -> f64 {
        let y = DVector::from_column_slice(y);
        let s = self.precision(xi).cholesky().expect("positive definite").solve(&y);
        y.dot(&s)
    }

    fn code(&self, t: &[usize]) -> usize {
        let mut c = 0;
        for (k, g) in t.iter().zip(&self.grids).rev() {
            c = c * g.len() + k;
        }
        c
    }

    fn geq(&self, i: usize, j: usize) -> bool {
        self.atoms[i].iter().zip(&self.atoms[j]).all(|(a, b)| a >= b)
    }
}

/// ν(ξ)ν(ξ′) ≤ ν(ξ∧ξ′)ν(ξ∨ξ′) for every pair of grid atoms, compared in logs.
pub fn check_log_supermodular(sm: &SmallMixture) -> CheckReport {
    let mut rep = CheckReport::new("log-supermodular", 1e-10);
    let m = sm.atom_count();
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (&sm.atoms[i], &sm.atoms[j]);
            let meet: Vec<usize> = a.iter().zip(b).map(|(x, y)| *x.min(y)).collect();
            let join: Vec<usize> = a.iter().zip(b).map(|(x, y)| *x.max(y)).collect();
            let lhs = sm.log_w[i] + sm.log_w[j];
            let rhs = sm.log_w[sm.code(&meet)] + sm.log_w[sm.code(&join)];
            rep.push(rhs - lhs);
        }
    }
    rep
}

/// E_ν[1_U] ≤ E_{∏ρ}[1_U] over every corner upper set {ξ ⪰ a} and `random_sets` random
/// unions of corners.
pub fn check_stoc_domination_with<R: Rng + ?Sized>(sm: &SmallMixture, random_sets: usize, rng: &mut R) -> CheckReport {
    let mut rep = CheckReport::new("stochastic-domination", 1e-12);
    let m = sm.atom_count();
    let mass = |set: &dyn Fn(usize) -> bool| -> (f64, f64) {
        (0..m).filter(|&i| set(i)).fold((0.0, 0.0), |(a, b), i| (a + sm.weight(i), b + sm.prior_weight(i)))
    };
    for a in 0..m {
        let (nu, prod) = mass(&|i| sm.geq(i, a));
        rep.push(prod - nu);
    }
    for _ in 0..random_sets {
        let k = rng.random_range(1..=3.min(m));
        let corners: Vec<usize> = (0..k).map(|_| rng.random_range(0..m)).collect();
        let (nu, prod) = mass(&|i| corners.iter().any(|&a| sm.geq(i, a)));
        rep.push(prod - nu);
    }
    rep
}

pub fn check_stoc_domination(sm: &SmallMixture) -> CheckReport {
    check_stoc_domination_with(sm, 100, &mut ChaCha8Rng::seed_from_u64(0))
}

/// Random increasing function on the atoms: non-negative combination of corner indicators.
pub fn random_increasing<R: Rng + ?Sized>(sm: &SmallMixture, rng: &mut R) -> Vec<f64> {
    let m = sm.atom_count();
    let corners: Vec<(usize, f64)> = (0..3).map(|_| (rng.random_range(0..m), rng.random::<f64>())).collect();
    (0..m).map(|i| corners.iter().filter(|(a, _)| sm.geq(i, *a)).map(|c| c.1).sum()).collect()
}

/// E_ν[fg] ≥ E_ν[f] E_ν[g] for functions given by their values on the atoms.
pub fn fkg_margin(sm: &SmallMixture, f: &[f64], g: &[f64]) -> f64 {
    let e = |h: &dyn Fn(usize) -> f64| (0..sm.atom_count()).map(|i| sm.weight(i) * h(i)).sum::<f64>();
    e(&|i| f[i] * g[i]) - e(&|i| f[i]) * e(&|i| g[i])
}

pub fn check_fkg_association<R: Rng + ?Sized>(sm: &SmallMixture, trials: usize, rng: &mut R) -> CheckReport {
    let mut rep = CheckReport::new("fkg", 1e-12);
    for _ in 0..trials {
        let f = random_increasing(sm, rng);
        let g = random_increasing(sm, rng);
        rep.push(fkg_margin(sm, &f, &g));
    }
    rep
}

/// Intersection of symmetric strips {|⟨v, x⟩| ≤ c}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub strips: Vec<(Vec<f64>, f64)>,
}

impl Region {
    pub fn whole() -> Self {
        Region { strips: Vec::new() }
    }

    pub fn strip(v: Vec<f64>, c: f64) -> Self {
        Region { strips: vec![(v, c)] }
    }

    /// {|x_i| ≤ w_i}; infinite widths impose nothing.
    pub fn coordinate_box(widths: &[f64]) -> Self {
        let n = widths.len();
        let strips = widths
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_finite())
            .map(|(i, &w)| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                (v, w)
            })
            .collect();
        Region { strips }
    }

    pub fn intersect(&self, other: &Region) -> Region {
        Region { strips: self.strips.iter().chain(&other.strips).cloned().collect() }
    }
}

const Z_CUT: f64 = 9.0;

/// P[X ∈ region] for X ~ N(0, cov), cov of size n ≤ 4, by nested quadrature in whitened coordinates.
pub fn gaussian_region_probability(cov: &DMatrix<f64>, region: &Region) -> f64 {
    if region.strips.is_empty() {
        return 1.0;
    }
    let n = cov.nrows();
    let l = cov.clone().cholesky().expect("positive definite covariance").l();
    let cons: Vec<(Vec<f64>, f64)> = region
        .strips
        .iter()
        .map(|(v, c)| ((l.transpose() * DVector::from_column_slice(v)).iter().copied().collect(), *c))
        .collect();
    let mut z = vec![0.0; n];
    nested(&cons, 0, &mut z)
}

fn bounds(cons: &[(Vec<f64>, f64)], level: usize, z: &[f64]) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (w, c) in cons {
        if w[level + 1..].iter().any(|&x| x != 0.0) {
            continue;
        }
        let s: f64 = (0..level).map(|i| w[i] * z[i]).sum();
        let a = w[level];
        if a.abs() < 1e-14 {
            if s.abs() > *c {
                return None;
            }
            continue;
        }
        let (p, q) = ((-c - s) / a, (c - s) / a);
        lo = lo.max(p.min(q));
        hi = hi.min(p.max(q));
    }
    (lo < hi).then_some((lo, hi))
}

fn nested(cons: &[(Vec<f64>, f64)], level: usize, z: &mut [f64]) -> f64 {
    let n = z.len();
    let Some((lo, hi)) = bounds(cons, level, z) else {
        return 0.0;
    };
    if level + 1 == n {
        return (normal_cdf(hi) - normal_cdf(lo)).max(0.0);
    }
    let (lo, hi) = (lo.max(-Z_CUT), hi.min(Z_CUT));
    if lo >= hi {
        return 0.0;
    }
    let mut buf = z.to_vec();
    integrate(
        |t| {
            buf[level] = t;
            (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt() * nested(cons, level + 1, &mut buf)
        },
        lo,
        hi,
        1e-12,
        1e-11,
    )
    .value
}

/// Γ(K₁ ∩ K₂) ≥ Γ(K₁) Γ(K₂) for Γ = ∫ γ_ξ dν(ξ).
pub fn check_fkg_gci(sm: &SmallMixture, k1: &Region, k2: &Region) -> Result<CheckReport> {
    if sm.dim() > 3 {
        return Err(invalid("n", "box probabilities need n ≤ 3"));
    }
    for (v, _) in k1.strips.iter().chain(&k2.strips) {
        if v.len() != sm.dim() {
            return Err(invalid("region", "strip normal has the wrong length"));
        }
    }
    let both = k1.intersect(k2);
    let (mut p1, mut p2, mut p12) = (0.0, 0.0, 0.0);
    for i in 0..sm.atom_count() {
        let w = sm.weight(i);
        let cov = sm.covariance(i);
        p1 += w * gaussian_region_probability(&cov, k1);
        p2 += w * gaussian_region_probability(&cov, k2);
        p12 += w * gaussian_region_probability(&cov, &both);
    }
    let mut rep = CheckReport::new("fkg-gci", 1e-8);
    rep.push(p12 - p1 * p2);
    Ok(rep)
}

/// Convex increasing test functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConvexFn {
    Identity,
    Hinge { t: f64 },
    Power { p: f64 },
}

impl ConvexFn {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ConvexFn::Identity => x,
            ConvexFn::Hinge { t } => (x - t).max(0.0),
            ConvexFn::Power { p } => x.max(0.0).powf(p),
        }
    }
}

/// E_ν[Φ(Q_ξ(y))] ≤ max_e E_ν[Φ(ξ_e² Q_1(y))], both sides exact sums over atoms.
pub fn check_convex_comparison(sm: &SmallMixture, phi: &dyn Fn(f64) -> f64, y: &[f64]) -> Result<CheckReport> {
    if y.len() != sm.dim() {
        return Err(invalid("y", "wrong length"));
    }
    let q1 = sm.q(&vec![1.0; sm.functional_count()], y);
    let mut lhs = 0.0;
    let mut rhs = vec![0.0; sm.functional_count()];
    for i in 0..sm.atom_count() {
        let w = sm.weight(i);
        let xi = sm.xi(i);
        lhs += w * phi(sm.q(&xi, y));
        for (e, x) in xi.iter().enumerate() {
            rhs[e] += w * phi(x * x * q1);
        }
    }
    let sup = rhs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut rep = CheckReport::new("convex-comparison", 1e-10 * sup.abs().max(1e-300));
    rep.push(sup - lhs);
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexComparisonMc {
    pub q1: f64,
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
    pub rhs_se: f64,
    pub report: CheckReport,
}

/// E[(cκ² − t)₊] for κ ~ shifted Pareto(α, A), α > 2.
pub fn pareto_hinge_mean(alpha: f64, a: f64, c: f64, t: f64) -> f64 {
    let tau = t / c;
    if tau <= a * a {
        c * alpha * a * a / (alpha - 2.0) - t
    } else {
        c * a.powf(alpha) * tau.powf(1.0 - alpha / 2.0) / (alpha / 2.0 - 1.0)
    }
}

/// Product-ρ version on a lattice model: LHS by Monte Carlo over ξ ~ ρ^{⊗E}, RHS in closed
/// form for hinge functions of a Pareto law and by Monte Carlo otherwise.
pub fn check_convex_comparison_mc<R: Rng + ?Sized>(
    model: &FunctionalModel,
    rho: &MixtureMeasure,
    phi: ConvexFn,
    y: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<ConvexComparisonMc> {
    if y.len() != model.dof() {
        return Err(invalid("y", "wrong length"));
    }
    if samples < 2 {
        return Err(invalid("samples", "need at least 2"));
    }
    let quad = |xi: ResistanceAssignment| -> Result<f64> { assemble_precision(model, &xi)?.quadratic_form(y) };
    let q1 = quad(ResistanceAssignment::uniform(model.functional_count(), 1.0))?;
    let mut l = Vec::with_capacity(samples);
    let mut r = Vec::with_capacity(samples);
    for _ in 0..samples {
        let xi = rho.sample_many(model.functional_count(), rng);
        r.push(phi.eval(xi[0] * xi[0] * q1));
        l.push(phi.eval(quad(ResistanceAssignment::new(xi)?)?));
    }
    let mean_se = |v: &[f64]| {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let s2 = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (s2 / n).sqrt())
    };
    let (lhs, lhs_se) = mean_se(&l);
    let (rhs, rhs_se) = match (rho.kind(), phi) {
        (MixtureKind::ShiftedPareto { alpha, a }, ConvexFn::Hinge { t }) if *alpha > 2.0 => {
            (pareto_hinge_mean(*alpha, *a, q1, t), 0.0)
        }
        _ => mean_se(&r),
    };
    let mut report = CheckReport::new("convex-comparison-mc", 3.0 * (lhs_se * lhs_se + rhs_se * rhs_se).sqrt());
    report.push(rhs - lhs);
    Ok(ConvexComparisonMc { q1, lhs, lhs_se, rhs, rhs_se, report })
}

pub struct CorpusEntry {
    pub id: String,
    pub mixture: SmallMixture,
}

/// Twenty small mixtures over n ∈ {1, 2, 3} with two-point and four-point grids.
pub fn standard_corpus() -> Vec<CorpusEntry> {
    let four = |s: f64| vec![(0.5 * s, 0.1), (1.0 * s, 0.4), (2.0 * s, 0.3), (4.0 * s, 0.2)];
    let path2 = vec![vec![1.0, 0.0], vec![1.0, -1.0], vec![0.0, 1.0]];
    let path3 = vec![vec![1.0, 0.0, 0.0], vec![1.0, -1.0, 0.0], vec![0.0, 1.0, -1.0], vec![0.0, 0.0, 1.0]];
    let triangle = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, -1.0], vec![1.0, 1.0]];
    let star3 = vec![vec![1.0, 0.0, 0.0], vec![1.0, -1.0, 0.0], vec![1.0, 0.0, -1.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
    let k4 = vec![
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![1.0, -1.0, 0.0],
        vec![0.0, 1.0, -1.0],
        vec![1.0, 0.0, -1.0],
    ];
    let lap = vec![vec![2.0, -1.0], vec![-1.0, 2.0], vec![1.0, 0.0]];
    let lap3 = vec![vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0], vec![1.0, 1.0, 1.0]];
    let tp = |n, f: &Vec<Vec<f64>>, k1, k2, w| SmallMixture::two_point(n, f.clone(), k1, k2, w).expect("corpus");
    let fp = |n, f: &Vec<Vec<f64>>, s: f64| SmallMixture::new(n, f.clone(), vec![four(s); f.len()]).expect("corpus");
    let mixed = |n, f: &Vec<Vec<f64>>| {
        let g = (0..f.len()).map(|e| if e % 2 == 0 { four(1.0) } else { vec![(1.0, 0.5), (3.0, 0.5)] }).collect();
        SmallMixture::new(n, f.clone(), g).expect("corpus")
    };
    let list: Vec<(&str, SmallMixture)> = vec![
        ("n1-edge-2pt", tp(1, &vec![vec![1.0]], 1.0, 2.0, 0.5)),
        ("n1-edge-4pt", fp(1, &vec![vec![1.0]], 1.0)),
        ("n1-parallel-2pt", tp(1, &vec![vec![1.0], vec![1.0]], 1.0, 3.0, 0.3)),
        ("n1-parallel3-2pt", tp(1, &vec![vec![1.0], vec![1.0], vec![1.0]], 0.5, 2.0, 0.6)),
        ("n1-parallel-4pt", fp(1, &vec![vec![1.0], vec![2.0]], 1.0)),
        ("n2-path-2pt", tp(2, &path2, 1.0, 2.0, 0.5)),
        ("n2-path-2pt-skew", tp(2, &path2, 0.3, 5.0, 0.8)),
        ("n2-path-4pt", fp(2, &path2, 1.0)),
        ("n2-path-mixed", mixed(2, &path2)),
        ("n2-triangle-2pt", tp(2, &triangle, 1.0, 2.5, 0.4)),
        ("n2-triangle-4pt", fp(2, &triangle, 0.7)),
        ("n2-laplacian-2pt", tp(2, &lap, 1.0, 2.0, 0.5)),
        ("n2-laplacian-4pt", fp(2, &lap, 1.0)),
        ("n3-path-2pt", tp(3, &path3, 1.0, 2.0, 0.5)),
        ("n3-path-4pt", fp(3, &path3, 1.0)),
        ("n3-path-mixed", mixed(3, &path3)),
        ("n3-star-2pt", tp(3, &star3, 1.0, 4.0, 0.5)),
        ("n3-k4-2pt", tp(3, &k4, 1.0, 2.0, 0.5)),
        ("n3-k4-2pt-skew", tp(3, &k4, 0.5, 1.5, 0.2)),
        ("n3-laplacian-2pt", tp(3, &lap3, 1.0, 3.0, 0.5)),
    ];
    list.into_iter().map(|(id, mixture)| CorpusEntry { id: id.into(), mixture }).collect()
}
