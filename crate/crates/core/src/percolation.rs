//! Bernoulli bond percolation, threshold subgraphs and wired-box resistance profiles.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::{assemble_precision_with, variance, ResistanceAssignment, SolverPolicy};
use crate::gibbs::run_replicas;
use crate::graph::{build_lattice_box, wired_box_edge_keys, Boundary, Graph};
use crate::potential::MixtureMeasure;

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    /// Component labels 0.. in order of first appearance, plus component sizes.
    pub fn labels(&mut self) -> (Vec<usize>, Vec<usize>) {
        let n = self.parent.len();
        let mut id = vec![usize::MAX; n];
        let mut labels = Vec::with_capacity(n);
        let mut sizes = Vec::new();
        for v in 0..n {
            let r = self.find(v);
            if id[r] == usize::MAX {
                id[r] = sizes.len();
                sizes.push(0);
            }
            labels.push(id[r]);
            sizes[id[r]] += 1;
        }
        (labels, sizes)
    }
}

#[derive(Debug, Clone)]
pub struct PercolationSample {
    pub p: f64,
    open: Vec<bool>,
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl PercolationSample {
    pub fn from_open(graph: &Graph, p: f64, open: Vec<bool>) -> Self {
        let (labels, sizes) = open_components(graph, &open);
        PercolationSample { p, open, labels, sizes }
    }

    pub fn open(&self) -> &[bool] {
        &self.open
    }

    pub fn open_count(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn cluster_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn largest_cluster(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }
}

pub fn open_components(graph: &Graph, open: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let mut uf = UnionFind::new(graph.vertex_count());
    for (e, &(a, b)) in graph.edges().iter().enumerate() {
        if open[e] {
            uf.union(a, b);
        }
    }
    uf.labels()
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("p", format!("{p} outside [0, 1]")));
    }
    Ok(())
}

/// p-Bernoulli bond percolation.
pub fn percolate<R: Rng + ?Sized>(graph: &Graph, p: f64, rng: &mut R) -> Result<PercolationSample> {
    Ok(percolate_coupled(graph, &[p], rng)?.pop().expect("one sample"))
}

/// Samples at several p sharing one uniform per edge, so open sets are nested in p.
pub fn percolate_coupled<R: Rng + ?Sized>(graph: &Graph, ps: &[f64], rng: &mut R) -> Result<Vec<PercolationSample>> {
    for &p in ps {
        check_p(p)?;
    }
    let u: Vec<f64> = (0..graph.edge_count()).map(|_| rng.random()).collect();
    Ok(ps
        .iter()
        .map(|&p| PercolationSample::from_open(graph, p, u.iter().map(|&x| x < p).collect()))
        .collect())
}

/// Open edges {e : ξ_e ≤ c}.
pub fn threshold_subgraph(xi: &ResistanceAssignment, c: f64) -> Vec<bool> {
    xi.values().iter().map(|&x| x <= c).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LatticeFamily {
    Hypercubic { d: usize },
    Tree { degree: usize },
}

/// Known bond-percolation thresholds.
pub fn critical_probability(family: LatticeFamily) -> Option<f64> {
    match family {
        LatticeFamily::Hypercubic { d } => match d {
            1 => Some(1.0),
            2 => Some(0.5),
            3 => Some(0.248_812),
            4 => Some(0.160_131),
            5 => Some(0.118_172),
            6 => Some(0.094_202),
            _ => None,
        },
        LatticeFamily::Tree { degree } if degree >= 3 => Some(1.0 / (degree - 1) as f64),
        LatticeFamily::Tree { .. } => None,
    }
}

/// Smallest C with ρ([0, C]) ≥ p.
pub fn cutoff_for(rho: &MixtureMeasure, p: f64) -> Result<f64> {
    check_p(p)?;
    if let Some(c) = rho.quantile(p) {
        return Ok(c);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut s = rho.sample_many(200_000, &mut rng);
    s.sort_by(f64::total_cmp);
    let i = ((p * s.len() as f64).ceil() as usize).clamp(1, s.len()) - 1;
    Ok(s[i])
}

/// C_{ρ,p} at p = (1 + p_c)/2.
pub fn default_cutoff(rho: &MixtureMeasure, family: LatticeFamily) -> Result<(f64, f64)> {
    let pc = critical_probability(family)
        .ok_or_else(|| invalid("family", format!("no tabulated threshold for {family:?}")))?;
    let p = 0.5 * (1.0 + pc);
    Ok((cutoff_for(rho, p)?, p))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub d: usize,
    pub ls: Vec<usize>,
    pub seed: u64,
    pub seeds: usize,
    #[serde(default = "one")]
    pub threads: usize,
    #[serde(default)]
    pub iterative: bool,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize)]
pub struct ResistanceProfile {
    pub d: usize,
    pub ls: Vec<usize>,
    pub seeds: Vec<u64>,
    /// r[i][s]: R(0 ↔ z) in box ls[i] under seed s.
    pub r: Vec<Vec<f64>>,
    pub cutoff: f64,
    pub p: f64,
    /// reach[i][s]: whether the origin's cluster of {ξ ≤ C} touches the boundary of box ls[i].
    pub reach: Vec<Vec<bool>>,
}

fn quantile_sorted(s: &[f64], q: f64) -> f64 {
    let pos = q * (s.len() - 1) as f64;
    let (i, f) = (pos.floor() as usize, pos.fract());
    if i + 1 < s.len() {
        s[i] * (1.0 - f) + s[i + 1] * f
    } else {
        s[i]
    }
}

/// Ordinary least squares y = a + b x, returning (a, b, R²).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let b = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (my - b * mx, b, r2)
}

impl ResistanceProfile {
    pub fn quantile(&self, i: usize, q: f64) -> f64 {
        let mut s = self.r[i].clone();
        s.sort_by(f64::total_cmp);
        quantile_sorted(&s, q)
    }

    pub fn medians(&self) -> Vec<f64> {
        (0..self.ls.len()).map(|i| self.quantile(i, 0.5)).collect()
    }

    /// Slope of median R against ln L.
    pub fn log_slope(&self) -> (f64, f64) {
        let x: Vec<f64> = self.ls.iter().map(|&l| (l as f64).ln()).collect();
        let (_, b, r2) = linear_fit(&x, &self.medians());
        (b, r2)
    }

    /// Same slope after dividing medians by the median at the smallest L.
    pub fn normalized_log_slope(&self) -> f64 {
        let m = self.medians();
        let x: Vec<f64> = self.ls.iter().map(|&l| (l as f64).ln()).collect();
        let y: Vec<f64> = m.iter().map(|v| v / m[0]).collect();
        linear_fit(&x, &y).1
    }

    pub fn reach_fraction(&self, i: usize) -> f64 {
        self.reach[i].iter().filter(|&&b| b).count() as f64 / self.reach[i].len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("L,seed,R\n");
        for (i, &l) in self.ls.iter().enumerate() {
            for (k, &seed) in self.seeds.iter().enumerate() {
                let _ = writeln!(s, "{l},{seed},{:e}", self.r[i][k]);
            }
        }
        s
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let (slope, r2) = self.log_slope();
        let q: Vec<_> = (0..self.ls.len())
            .map(|i| {
                serde_json::json!({
                    "L": self.ls[i],
                    "q10": self.quantile(i, 0.1),
                    "median": self.quantile(i, 0.5),
                    "q90": self.quantile(i, 0.9),
                    "reach_fraction": self.reach_fraction(i),
                })
            })
            .collect();
        serde_json::json!({
            "d": self.d,
            "cutoff": self.cutoff,
            "p": self.p,
            "quantiles": q,
            "log_fit": {"slope": slope, "r2": r2, "normalized_slope": self.normalized_log_slope()},
        })
    }
}

/// R(0 ↔ z) on nested wired boxes with one ξ̂ ~ ρ^{⊗E} per seed drawn on the largest box.
pub fn cluster_resistance_profile(cfg: &ProfileConfig, rho: &MixtureMeasure) -> Result<ResistanceProfile> {
    if cfg.ls.is_empty() || cfg.seeds == 0 {
        return Err(invalid("ls", "need at least one box and one seed"));
    }
    let mut ls = cfg.ls.clone();
    ls.sort_unstable();
    ls.dedup();
    let lmax = *ls.last().expect("nonempty");
    let big_keys = wired_box_edge_keys(cfg.d, lmax);
    let index: HashMap<&(Vec<i64>, usize), usize> = big_keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let models = ls
        .iter()
        .map(|&l| {
            let m = build_lattice_box(cfg.d, l, Boundary::Wired, 1)?;
            let map: Vec<usize> = wired_box_edge_keys(cfg.d, l).iter().map(|k| index[k]).collect();
            Ok((m, map))
        })
        .collect::<Result<Vec<_>>>()?;
    let (cutoff, p) = default_cutoff(rho, LatticeFamily::Hypercubic { d: cfg.d })?;
    let policy = if cfg.iterative { SolverPolicy::Iterative } else { SolverPolicy::Auto };
    let seeds: Vec<u64> = (0..cfg.seeds as u64).map(|k| cfg.seed + k).collect();
    let runs = run_replicas(cfg.seed, cfg.seeds, cfg.threads, |seed| -> Result<Vec<(f64, bool)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi_big = rho.sample_many(big_keys.len(), &mut rng);
        models
            .iter()
            .map(|(m, map)| {
                let xi = ResistanceAssignment::new(map.iter().map(|&e| xi_big[e]).collect())?;
                let prec = assemble_precision_with(m, &xi, policy)?;
                let r = variance(m, &prec, m.origin_site())?;
                let open = threshold_subgraph(&xi, cutoff);
                let net = m.network().expect("gradient model");
                let (labels, _) = open_components(&net, &open);
                let reach = labels[m.origin_site()] == labels[m.ground_vertex()];
                Ok((r, reach))
            })
            .collect()
    });
    let mut r = vec![Vec::with_capacity(seeds.len()); ls.len()];
    let mut reach = vec![Vec::with_capacity(seeds.len()); ls.len()];
    for run in runs {
        for (i, (v, b)) in run?.into_iter().enumerate() {
            r[i].push(v);
            reach[i].push(b);
        }
    }
    Ok(ResistanceProfile { d: cfg.d, ls, seeds, r, cutoff, p, reach })
}
