//! Samplers for the gradient Gibbs measures: exact data augmentation for mixture
//! potentials, an independence Metropolis correction for U = V + W, and a plain
//! single-site Metropolis reference sampler.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{assemble_precision_with, sample_field, ResistanceAssignment, SolverPolicy};
use crate::graph::FunctionalModel;
use crate::potential::{decompose, log_grid, Decomposition, MixtureMeasure, Potential};
use crate::stats::integrated_autocorrelation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Sweeps after burn-in; every `thin`-th is recorded.
    pub sweeps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Probe site; the origin when absent.
    pub probe: Option<usize>,
    pub record_states: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { sweeps: 10_000, burn_in: 1_000, thin: 10, seed: 0, probe: None, record_states: false }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(invalid("thin", "must be at least 1"));
        }
        if self.sweeps < self.thin {
            return Err(invalid("sweeps", "must be at least `thin`"));
        }
        Ok(())
    }
}

/// Per-functional potentials: one shared or one per functional.
#[derive(Debug, Clone)]
pub struct PotentialField {
    shared: Option<Arc<dyn Potential>>,
    each: Vec<Arc<dyn Potential>>,
}

impl PotentialField {
    pub fn uniform(u: Arc<dyn Potential>) -> Self {
        PotentialField { shared: Some(u), each: Vec::new() }
    }

    pub fn per_functional(each: Vec<Arc<dyn Potential>>) -> Self {
        PotentialField { shared: None, each }
    }

    pub fn get(&self, e: usize) -> &Arc<dyn Potential> {
        self.shared.as_ref().unwrap_or_else(|| &self.each[e])
    }

    fn check(&self, m: usize) -> Result<()> {
        if self.shared.is_none() && self.each.len() != m {
            return Err(invalid("potentials", format!("expected {m}, got {}", self.each.len())));
        }
        Ok(())
    }

    fn name(&self) -> String {
        match &self.shared {
            Some(u) => u.name(),
            None => "per-functional".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub sweep: usize,
    pub phi_probe: f64,
    pub max_abs_phi: f64,
    pub max_phi: f64,
    pub min_phi: f64,
    pub mean_xi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerReport {
    pub acceptance_xi: Option<f64>,
    pub acceptance_phi: f64,
    pub tau_int: f64,
    pub ess: f64,
}

/// Thresholds 2^{k/2} for k in this range back the tail counters.
pub const TAIL_K: std::ops::RangeInclusive<i32> = -20..=60;

#[derive(Debug, Clone)]
pub struct Chain {
    pub sampler: &'static str,
    pub config: SamplerConfig,
    pub potential: String,
    pub mixture: String,
    pub probe: usize,
    pub records: Vec<SweepRecord>,
    /// Running sums of φ, φ², φ³ per site.
    pub moments: Vec<[f64; 3]>,
    /// Counts of |φ(probe)| ≥ 2^{k/2}, k over `TAIL_K`.
    pub tail_counts: Vec<u64>,
    pub states: Option<Vec<(Vec<f64>, Vec<f64>)>>,
    pub report: SamplerReport,
}

impl Chain {
    fn new(sampler: &'static str, cfg: &SamplerConfig, model: &FunctionalModel, potential: String, mixture: String) -> Self {
        Chain {
            sampler,
            config: cfg.clone(),
            potential,
            mixture,
            probe: cfg.probe.unwrap_or_else(|| model.origin_site()),
            records: Vec::with_capacity(cfg.sweeps / cfg.thin),
            moments: vec![[0.0; 3]; model.site_count()],
            tail_counts: vec![0; TAIL_K.count()],
            states: cfg.record_states.then(Vec::new),
            report: SamplerReport { acceptance_xi: None, acceptance_phi: 1.0, tau_int: 1.0, ess: 0.0 },
        }
    }

    fn record(&mut self, sweep: usize, model: &FunctionalModel, phi: &[f64], xi: Option<&[f64]>) {
        let sites = model.to_sites(phi);
        let p = sites[self.probe];
        let (mut mx, mut mn, mut ma) = (f64::NEG_INFINITY, f64::INFINITY, 0f64);
        for (s, &v) in sites.iter().enumerate() {
            mx = mx.max(v);
            mn = mn.min(v);
            ma = ma.max(v.abs());
            let m = &mut self.moments[s];
            m[0] += v;
            m[1] += v * v;
            m[2] += v * v * v;
        }
        for (c, k) in self.tail_counts.iter_mut().zip(TAIL_K) {
            if p.abs() >= 2f64.powf(k as f64 / 2.0) {
                *c += 1;
            }
        }
        let mean_xi = xi.map_or(f64::NAN, |x| {
            let f: Vec<f64> = x.iter().copied().filter(|v| v.is_finite()).collect();
            f.iter().sum::<f64>() / f.len().max(1) as f64
        });
        self.records.push(SweepRecord { sweep, phi_probe: p, max_abs_phi: ma, max_phi: mx, min_phi: mn, mean_xi });
        if let Some(st) = &mut self.states {
            st.push((phi.to_vec(), xi.map_or_else(Vec::new, <[f64]>::to_vec)));
        }
    }

    fn finish(&mut self, accepted_phi: u64, proposed_phi: u64, acc_xi: Option<f64>) {
        let series = self.probe_series();
        let tau = integrated_autocorrelation(&series);
        self.report = SamplerReport {
            acceptance_xi: acc_xi,
            acceptance_phi: if proposed_phi == 0 { 1.0 } else { accepted_phi as f64 / proposed_phi as f64 },
            tau_int: tau,
            ess: series.len() as f64 / tau,
        };
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn probe_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.phi_probe).collect()
    }

    pub fn max_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.max_abs_phi).collect()
    }

    pub fn site_mean(&self, site: usize) -> f64 {
        self.moments[site][0] / self.len() as f64
    }

    pub fn site_variance(&self, site: usize) -> f64 {
        let n = self.len() as f64;
        let m = self.moments[site][0] / n;
        (self.moments[site][1] / n - m * m) * n / (n - 1.0)
    }

    pub fn site_third_moment(&self, site: usize) -> f64 {
        self.moments[site][2] / self.len() as f64
    }

    /// Survival estimates of |φ(probe)| at the tail-counter thresholds.
    pub fn tail_survival(&self) -> Vec<(f64, f64)> {
        let n = self.len().max(1) as f64;
        TAIL_K.zip(&self.tail_counts).map(|(k, &c)| (2f64.powf(k as f64 / 2.0), c as f64 / n)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("sweep,phi_probe,max_abs_phi,max_phi,min_phi,mean_xi\n");
        for r in &self.records {
            let _ = writeln!(
                s,
                "{},{:e},{:e},{:e},{:e},{:e}",
                r.sweep, r.phi_probe, r.max_abs_phi, r.max_phi, r.min_phi, r.mean_xi
            );
        }
        s
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "sampler": self.sampler,
            "seed": self.config.seed,
            "sweeps": self.config.sweeps,
            "burn_in": self.config.burn_in,
            "thin": self.config.thin,
            "potential": self.potential,
            "mixture": self.mixture,
            "probe": self.probe,
            "records": self.records.len(),
            "report": self.report,
        })
    }
}

fn check_probe(model: &FunctionalModel, cfg: &SamplerConfig) -> Result<()> {
    cfg.validate()?;
    if let Some(p) = cfg.probe {
        if p >= model.site_count() {
            return Err(invalid("probe", format!("site {p} out of range")));
        }
    }
    Ok(())
}

fn initial_xi(model: &FunctionalModel, rho: &MixtureMeasure) -> Vec<f64> {
    let m = rho.median();
    (0..model.functional_count()).map(|e| if model.is_forced_infinite(e) { f64::INFINITY } else { m }).collect()
}

fn update_xi<R: Rng>(model: &FunctionalModel, rho: &MixtureMeasure, phi: &[f64], xi: &mut [f64], rng: &mut R) -> Result<()> {
    for (e, f) in model.functionals().iter().enumerate() {
        if model.is_forced_infinite(e) {
            continue;
        }
        xi[e] = rho.sample_posterior(f.apply(phi), rng)?;
    }
    Ok(())
}

/// φ-draws factor F(ξ) unless that costs more than this many CG iterations of
/// about box-side length each.
const CG_ITERATION_BUDGET: f64 = 10.0;

fn sampler_policy(model: &FunctionalModel) -> SolverPolicy {
    let pat = model.pattern();
    let side = (model.dof().max(1) as f64).powf(1.0 / model.dim().max(1) as f64);
    let nnz = pat.csc.values.len() as f64;
    if pat.symbolic().flops() <= CG_ITERATION_BUDGET * nnz * side {
        SolverPolicy::Direct
    } else {
        SolverPolicy::Iterative
    }
}

fn draw_phi<R: Rng>(model: &FunctionalModel, xi: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let xi = ResistanceAssignment::new(xi.to_vec())?;
    let p = assemble_precision_with(model, &xi, sampler_policy(model))?;
    sample_field(model, &xi, &p, rng)
}

/// Systematic-scan data augmentation targeting the mixture potential of ρ.
pub fn sample_mixture_exact(model: &FunctionalModel, rho: &MixtureMeasure, cfg: &SamplerConfig) -> Result<Chain> {
    check_probe(model, cfg)?;
    if !rho.supports_posterior() {
        return Err(Error::Unsupported(format!("{} has no exact posterior sampler", rho.name())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut chain = Chain::new("mixture-exact", cfg, model, format!("mixture[{}]", rho.name()), rho.name());
    let mut phi = vec![0.0; model.dof()];
    let mut xi = initial_xi(model, rho);
    for sweep in 0..cfg.burn_in + cfg.sweeps {
        update_xi(model, rho, &phi, &mut xi, &mut rng)?;
        phi = draw_phi(model, &xi, &mut rng)?;
        if sweep >= cfg.burn_in && (sweep - cfg.burn_in + 1) % cfg.thin == 0 {
            chain.record(sweep, model, &phi, Some(&xi));
        }
    }
    chain.finish(0, 0, None);
    Ok(chain)
}

fn decompositions(model: &FunctionalModel, u: &PotentialField, rho: &MixtureMeasure) -> Result<Vec<Arc<Decomposition>>> {
    u.check(model.functional_count())?;
    let grid = log_grid(1e-3, 1e3, 200);
    let mut cache: HashMap<*const (), Arc<Decomposition>> = HashMap::new();
    let mut out = Vec::with_capacity(model.functional_count());
    for e in 0..model.functional_count() {
        let p = u.get(e);
        let key = Arc::as_ptr(p) as *const ();
        let d = match cache.get(&key) {
            Some(d) => d.clone(),
            None => {
                let d = Arc::new(decompose(p.clone(), rho, &grid)?);
                cache.insert(key, d.clone());
                d
            }
        };
        out.push(d);
    }
    Ok(out)
}

/// Data augmentation for V plus an independence Metropolis φ-step correcting by W = U − V.
pub fn sample_splice(
    model: &FunctionalModel,
    u: &PotentialField,
    rho: &MixtureMeasure,
    cfg: &SamplerConfig,
) -> Result<Chain> {
    check_probe(model, cfg)?;
    if !rho.supports_posterior() {
        return Err(Error::Unsupported(format!("{} has no exact posterior sampler", rho.name())));
    }
    let dec = decompositions(model, u, rho)?;
    let fs = model.functionals();
    let w_total = |phi: &[f64]| -> f64 {
        fs.iter().enumerate().filter(|(e, _)| !model.is_forced_infinite(*e)).map(|(e, f)| dec[e].w_at(f.apply(phi))).sum()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut chain = Chain::new("splice", cfg, model, u.name(), rho.name());
    let mut phi = vec![0.0; model.dof()];
    let mut w_cur = w_total(&phi);
    let mut xi = initial_xi(model, rho);
    let (mut acc, mut prop) = (0u64, 0u64);
    for sweep in 0..cfg.burn_in + cfg.sweeps {
        update_xi(model, rho, &phi, &mut xi, &mut rng)?;
        let cand = draw_phi(model, &xi, &mut rng)?;
        let w_new = w_total(&cand);
        let u: f64 = rng.random();
        let take = u.ln() < -(w_new - w_cur);
        if sweep >= cfg.burn_in {
            prop += 1;
            acc += u64::from(take);
        }
        if take {
            phi = cand;
            w_cur = w_new;
        }
        if sweep >= cfg.burn_in && (sweep - cfg.burn_in + 1) % cfg.thin == 0 {
            chain.record(sweep, model, &phi, Some(&xi));
        }
    }
    chain.finish(acc, prop, None);
    Ok(chain)
}

/// Single-site Gaussian random-walk Metropolis, systematic scan over coordinates.
pub fn sample_metropolis(model: &FunctionalModel, u: &PotentialField, step: f64, cfg: &SamplerConfig) -> Result<Chain> {
    check_probe(model, cfg)?;
    u.check(model.functional_count())?;
    if !(step > 0.0) {
        return Err(invalid("step", format!("{step} must be > 0")));
    }
    let fs = model.functionals();
    let active: Vec<bool> = (0..fs.len()).map(|e| !model.is_forced_infinite(e)).collect();
    let mut touch: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.dof()];
    for (e, f) in fs.iter().enumerate() {
        if active[e] {
            for &(i, c) in &f.entries {
                touch[i].push((e, c));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut chain = Chain::new("metropolis", cfg, model, u.name(), "none".into());
    let mut phi = vec![0.0; model.dof()];
    let mut delta = vec![0.0; fs.len()];
    let (mut acc, mut prop) = (0u64, 0u64);
    for sweep in 0..cfg.burn_in + cfg.sweeps {
        for i in 0..model.dof() {
            let h: f64 = step * rng.sample::<f64, _>(StandardNormal);
            let mut de = 0.0;
            for &(e, c) in &touch[i] {
                let p = u.get(e);
                de += p.value(delta[e] + c * h) - p.value(delta[e]);
            }
            let r: f64 = rng.random();
            let take = r.ln() < -de;
            if sweep >= cfg.burn_in {
                prop += 1;
                acc += u64::from(take);
            }
            if take {
                phi[i] += h;
                for &(e, c) in &touch[i] {
                    delta[e] += c * h;
                }
            }
        }
        if sweep >= cfg.burn_in && (sweep - cfg.burn_in + 1) % cfg.thin == 0 {
            chain.record(sweep, model, &phi, None);
        }
    }
    chain.finish(acc, prop, None);
    Ok(chain)
}

/// Runs `f(seed + r)` for r in 0..replicas on up to `threads` OS threads; output is in replica order.
pub fn run_replicas<T, F>(seed: u64, replicas: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let threads = threads.clamp(1, replicas.max(1));
    let mut out: Vec<Option<T>> = (0..replicas).map(|_| None).collect();
    std::thread::scope(|s| {
        let f = &f;
        let chunks: Vec<_> = out.chunks_mut(replicas.div_ceil(threads).max(1)).enumerate().collect();
        let per = replicas.div_ceil(threads).max(1);
        for (c, slot) in chunks {
            s.spawn(move || {
                for (k, o) in slot.iter_mut().enumerate() {
                    *o = Some(f(seed + (c * per + k) as u64));
                }
            });
        }
    });
    out.into_iter().map(|o| o.expect("replica ran")).collect()
}
