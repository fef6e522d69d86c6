use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use surflab::field::{assemble_precision_with, variance, ResistanceAssignment, SolverPolicy};
use surflab::gibbs::{run_replicas, sample_metropolis, sample_mixture_exact, sample_splice, Chain, PotentialField, SamplerConfig};
use surflab::graph::{box_graph, build_lattice_box, FunctionalModel};
use surflab::inequality::{
    check_convex_comparison, check_det_inequality, check_fkg_association, check_fkg_gci, check_log_supermodular,
    check_stoc_domination, check_stoc_domination_with, CheckReport, ConvexFn, NuMutation, Region, SmallMixture,
};
use surflab::percolation::{cluster_resistance_profile, percolate_coupled, ProfileConfig};
use surflab::potential::{decompose_with_tolerance, log_grid, MixtureMeasure};
use surflab::stats::{fit_power_tail, fit_stretched_tail, fit_tail, max_scaling, thin_by_autocorrelation, variance_growth};

use crate::config::{Algorithm, ExperimentConfig, ExperimentKind, ModelSpec, TailFit, VarianceMethod};
use crate::runner::RunError;

/// Output files keyed by name; contents depend only on the canonical config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub files: BTreeMap<String, String>,
}

impl Artifacts {
    fn add(&mut self, name: impl Into<String>, content: String) {
        self.files.insert(name.into(), content);
    }

    fn summary(&mut self, v: Value) {
        self.add("summary.json", serde_json::to_string_pretty(&v).expect("json") + "\n");
    }
}

type Out = Result<Artifacts, RunError>;

pub fn run_experiment(cfg: &ExperimentConfig) -> Out {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::Decompose => decompose(cfg),
        ExperimentKind::Sample => sample(cfg),
        ExperimentKind::ResistanceProfile => resistance_profile(cfg),
        ExperimentKind::Percolate => percolate(cfg),
        ExperimentKind::VerifyInequalities => verify_inequalities(cfg),
        ExperimentKind::Tails => tails(cfg),
        ExperimentKind::MaxScaling => max_scaling_run(cfg),
        ExperimentKind::VarianceGrowth => variance_growth_run(cfg),
    }
}

fn mixture(cfg: &ExperimentConfig) -> Result<MixtureMeasure, RunError> {
    Ok(cfg.mixture.as_ref().expect("validated").build()?)
}

fn build(m: &ModelSpec, l: usize) -> Result<FunctionalModel, RunError> {
    Ok(build_lattice_box(m.d, l, m.boundary.clone(), m.j)?)
}

fn decompose(cfg: &ExperimentConfig) -> Out {
    let u = cfg.potential.as_ref().expect("validated").build()?;
    let rho = mixture(cfg)?;
    let g = cfg.grid.clone().unwrap_or_default();
    let dec = decompose_with_tolerance(u.clone(), &rho, &log_grid(g.lo, g.hi, g.points), g.tolerance)?;
    let mut csv = String::from("x,U,V,V_error,W\n");
    for i in 0..dec.grid.len() {
        let x = dec.grid[i];
        let _ = writeln!(csv, "{x:e},{:e},{:e},{:e},{:e}", u.value(x), dec.v[i], dec.v_error[i], dec.w[i]);
    }
    let mut a = Artifacts::default();
    a.add("decomposition.csv", csv);
    a.summary(json!({
        "kind": "decompose",
        "potential": u.name(),
        "mixture": rho.name(),
        "points": dec.grid.len(),
        "closed_form_points": dec.closed_form.iter().filter(|&&c| c).count(),
        "constant": dec.constant,
        "max_violation": dec.max_violation,
        "worst_at": dec.worst_at,
        "tolerance": dec.tolerance,
    }));
    Ok(a)
}

/// Independent chains for one box, in replica order.
fn chains(cfg: &ExperimentConfig, model: &FunctionalModel) -> Result<Vec<Chain>, RunError> {
    let s = cfg.sampler()?;
    let probe = s.probe.as_ref().map(|c| model.site_of(c).expect("validated"));
    let base = SamplerConfig { sweeps: s.sweeps, burn_in: s.burn_in, thin: s.thin, seed: 0, probe, record_states: false };
    let rho = cfg.mixture.as_ref().map(|m| m.build()).transpose()?;
    let field = cfg.potential.as_ref().map(|p| p.build()).transpose()?.map(PotentialField::uniform);
    let out = run_replicas(cfg.seed, s.replicas, cfg.threads, |seed| {
        let sc = SamplerConfig { seed, ..base.clone() };
        match s.algorithm {
            Algorithm::MixtureExact => sample_mixture_exact(model, rho.as_ref().expect("validated"), &sc),
            Algorithm::Splice => {
                sample_splice(model, field.as_ref().expect("validated"), rho.as_ref().expect("validated"), &sc)
            }
            Algorithm::Metropolis => sample_metropolis(model, field.as_ref().expect("validated"), s.step, &sc),
        }
    });
    Ok(out.into_iter().collect::<Result<Vec<_>, _>>()?)
}

fn sample(cfg: &ExperimentConfig) -> Out {
    let m = cfg.model()?;
    let mut a = Artifacts::default();
    let mut runs = Vec::new();
    for &l in &m.ls {
        let model = build(m, l)?;
        for (r, c) in chains(cfg, &model)?.iter().enumerate() {
            a.add(format!("chain_L{l}_r{r}.csv"), c.to_csv());
            let mut v = c.summary_json();
            v["L"] = json!(l);
            v["replica"] = json!(r);
            v["probe_mean"] = json!(c.site_mean(c.probe));
            v["probe_variance"] = json!(c.site_variance(c.probe));
            runs.push(v);
        }
    }
    a.summary(json!({"kind": "sample", "runs": runs}));
    Ok(a)
}

fn tails(cfg: &ExperimentConfig) -> Out {
    let m = cfg.model()?;
    let fit = cfg.tails.clone().unwrap_or_default().fit;
    let mut a = Artifacts::default();
    let mut fits = Vec::new();
    for &l in &m.ls {
        let model = build(m, l)?;
        let series: Vec<f64> = chains(cfg, &model)?.iter().flat_map(|c| c.probe_series()).collect();
        let rep = match fit {
            TailFit::Auto => fit_tail(&series),
            TailFit::Power => fit_power_tail(&series),
            TailFit::Stretched => fit_stretched_tail(&series),
        }?;
        a.add(format!("tail_L{l}.csv"), rep.to_csv());
        fits.push(json!({
            "L": l,
            "model": rep.model,
            "samples": rep.samples,
            "exponent": rep.exponent,
            "band": [rep.band.0, rep.band.1],
            "exceedances": rep.exceedances,
            "loglog_slope": rep.loglog_slope,
            "survival_slope": rep.survival_slope,
        }));
    }
    a.summary(json!({"kind": "tails", "fits": fits}));
    Ok(a)
}

fn max_scaling_run(cfg: &ExperimentConfig) -> Out {
    let m = cfg.model()?;
    let norm = cfg.max_scaling.as_ref().expect("validated").normalization;
    let mut entries = Vec::new();
    for &l in &m.ls {
        let model = build(m, l)?;
        let maxes: Vec<f64> = chains(cfg, &model)?.iter().flat_map(|c| thin_by_autocorrelation(&c.max_series())).collect();
        entries.push((model.site_count(), maxes));
    }
    let rep = max_scaling(&entries, norm)?;
    let mut csv = String::from("n,index,normalized_max\n");
    for (n, v) in rep.sizes.iter().zip(&rep.normalized) {
        for (i, x) in v.iter().enumerate() {
            let _ = writeln!(csv, "{n},{i},{x:e}");
        }
    }
    let mut a = Artifacts::default();
    a.add("max_scaling.csv", csv);
    a.summary(json!({
        "kind": "max-scaling",
        "normalization": rep.normalization,
        "sizes": rep.sizes,
        "samples": rep.normalized.iter().map(Vec::len).collect::<Vec<_>>(),
        "medians": rep.medians,
        "slope": rep.slope,
        "spread": rep.spread,
    }));
    Ok(a)
}

fn variance_growth_run(cfg: &ExperimentConfig) -> Out {
    let m = cfg.model()?;
    let method = cfg.variance.clone().unwrap_or_default().method;
    let mut entries = Vec::new();
    for &l in &m.ls {
        let model = build(m, l)?;
        let v = match method {
            VarianceMethod::Exact => {
                let xi = ResistanceAssignment::uniform(model.functional_count(), 1.0);
                let p = assemble_precision_with(&model, &xi, SolverPolicy::Auto)?;
                variance(&model, &p, model.origin_site())?
            }
            VarianceMethod::Chain => {
                let cs = chains(cfg, &model)?;
                cs.iter().map(|c| c.site_variance(c.probe)).sum::<f64>() / cs.len() as f64
            }
        };
        entries.push((l, v));
    }
    let rep = variance_growth(&entries)?;
    let mut csv = String::from("L,variance\n");
    for (l, v) in &entries {
        let _ = writeln!(csv, "{l},{v:e}");
    }
    let mut a = Artifacts::default();
    a.add("variance.csv", csv);
    a.summary(json!({
        "kind": "variance-growth",
        "method": method,
        "ls": rep.ls,
        "variances": rep.variances,
        "intercept": rep.intercept,
        "slope": rep.slope,
        "r2": rep.r2,
        "log_constant": rep.log_constant(),
    }));
    Ok(a)
}

fn resistance_profile(cfg: &ExperimentConfig) -> Out {
    let m = cfg.model()?;
    let p = cfg.profile.as_ref().expect("validated");
    let pc = ProfileConfig {
        d: m.d,
        ls: m.ls.clone(),
        seed: cfg.seed,
        seeds: p.seeds,
        threads: cfg.threads,
        iterative: p.iterative,
    };
    let prof = cluster_resistance_profile(&pc, &mixture(cfg)?)?;
    let mut a = Artifacts::default();
    a.add("profile.csv", prof.to_csv());
    let mut s = prof.summary_json();
    s["kind"] = json!("resistance-profile");
    a.summary(s);
    Ok(a)
}

fn percolate(cfg: &ExperimentConfig) -> Out {
    let m = cfg.model()?;
    let spec = cfg.percolation.as_ref().expect("validated");
    let l = m.ls[0];
    let g = box_graph(m.d, l);
    let runs = run_replicas(cfg.seed, spec.samples, cfg.threads, |seed| {
        percolate_coupled(&g, &spec.p, &mut ChaCha8Rng::seed_from_u64(seed))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (nv, ne) = (g.vertex_count() as f64, g.edge_count().max(1) as f64);
    let mut csv = String::from("p,sample,open_fraction,components,largest_fraction\n");
    let mut mean_largest = vec![0.0; spec.p.len()];
    for (s, run) in runs.iter().enumerate() {
        for (k, ps) in run.iter().enumerate() {
            let largest = ps.largest_cluster() as f64 / nv;
            mean_largest[k] += largest / runs.len() as f64;
            let _ = writeln!(
                csv,
                "{:e},{s},{:e},{},{:e}",
                spec.p[k],
                ps.open_count() as f64 / ne,
                ps.component_count(),
                largest
            );
        }
    }
    let mut a = Artifacts::default();
    a.add("percolation.csv", csv);
    a.summary(json!({
        "kind": "percolate",
        "d": m.d,
        "L": l,
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "p": spec.p,
        "mean_largest_fraction": mean_largest,
    }));
    Ok(a)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct InequalityRow {
    pub instance: String,
    #[serde(flatten)]
    pub report: CheckReport,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct NegativeControl {
    pub name: String,
    /// Whether the check flagged the mutated measure, as it should.
    pub tripped: bool,
}

/// Every check over the standard corpus, plus mutated measures that must fail.
pub fn inequality_suite(cfg: &ExperimentConfig) -> Result<(Vec<InequalityRow>, Vec<NegativeControl>), RunError> {
    let q = cfg.inequalities.clone().unwrap_or_default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = vec![InequalityRow { instance: format!("wishart-n{}", q.det_n), report: check_det_inequality(q.det_n, q.det_trials, &mut rng)? }];
    let phis = [ConvexFn::Identity, ConvexFn::Hinge { t: 0.5 }, ConvexFn::Hinge { t: 2.0 }, ConvexFn::Power { p: 2.0 }];
    let corpus = surflab::inequality::standard_corpus();
    for c in &corpus {
        let sm = &c.mixture;
        let n = sm.dim();
        let mut push = |r: CheckReport| rows.push(InequalityRow { instance: c.id.clone(), report: r });
        push(check_log_supermodular(sm));
        push(check_stoc_domination_with(sm, q.random_sets, &mut rng));
        push(check_fkg_association(sm, q.fkg_trials, &mut rng));
        let mut w = vec![f64::INFINITY; n];
        w[0] = 1.0;
        push(check_fkg_gci(sm, &Region::coordinate_box(&w), &Region::strip(vec![1.0; n], 1.5))?);
        for phi in phis {
            for y in [vec![1.0; n], (0..n).map(|i| if i == 0 { 1.0 } else { -0.5 }).collect()] {
                let mut r = check_convex_comparison(sm, &|x| phi.eval(x), &y)?;
                r.check = format!("convex-comparison-{}", convex_label(phi));
                push(r);
            }
        }
    }
    let mut controls = Vec::new();
    let lsm = corpus
        .iter()
        .any(|c| !check_log_supermodular(&c.mixture.with_mutation(NuMutation::DetExponentFlipped)).passed());
    controls.push(NegativeControl { name: "log-supermodular/det-exponent-flipped".into(), tripped: lsm });
    let path2 = vec![vec![1.0, 0.0], vec![1.0, -1.0], vec![0.0, 1.0]];
    let sm = SmallMixture::two_point(2, path2, 1.0, 2.0, 0.5)?;
    let stoc = !check_stoc_domination(&sm.with_mutation(NuMutation::DropXiInverse)).passed();
    controls.push(NegativeControl { name: "stoc-domination/drop-xi-inverse".into(), tripped: stoc });
    let anti = SmallMixture::two_point(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]], 1.0, 10.0, 0.5)?
        .reweighted(|xi| if xi[0] != xi[1] { 1.0 } else { 1e-9 });
    let gci = !check_fkg_gci(&anti, &Region::strip(vec![1.0, 0.0], 1.0), &Region::strip(vec![0.0, 1.0], 1.0))?.passed();
    controls.push(NegativeControl { name: "fkg-gci/anti-correlated".into(), tripped: gci });
    let dec = |x: f64| (1.0 - x).max(0.0);
    let mut convex = false;
    for c in &corpus {
        convex |= !check_convex_comparison(&c.mixture, &dec, &vec![1.0; c.mixture.dim()])?.passed();
    }
    controls.push(NegativeControl { name: "convex-comparison/decreasing".into(), tripped: convex });
    Ok((rows, controls))
}

fn convex_label(phi: ConvexFn) -> String {
    match phi {
        ConvexFn::Identity => "identity".into(),
        ConvexFn::Hinge { t } => format!("hinge-{t}"),
        ConvexFn::Power { p } => format!("power-{p}"),
    }
}

fn verify_inequalities(cfg: &ExperimentConfig) -> Out {
    let (rows, controls) = inequality_suite(cfg)?;
    let mut csv = String::from("check,instance,trials,violations,worst_margin,tolerance\n");
    for r in &rows {
        let p = &r.report;
        let _ = writeln!(csv, "{},{},{},{},{:e},{:e}", p.check, r.instance, p.trials, p.violations, p.worst_margin, p.tolerance);
    }
    let violations: usize = rows.iter().map(|r| r.report.violations).sum();
    let mut a = Artifacts::default();
    a.add("inequalities.csv", csv);
    a.summary(json!({
        "kind": "verify-inequalities",
        "checks": rows.len(),
        "total_violations": violations,
        "negative_controls": controls,
    }));
    Ok(a)
}
