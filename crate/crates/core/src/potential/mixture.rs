use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::stable::{tilted_stable_normalizer, TiltChain};
use crate::error::{invalid, Error, Result};
use crate::special::{gamma_p, integrate, inv_gamma_p, ln_lower_gamma_scaled, log_sum_exp, LN_SQRT_2PI};

/// Draws used by Monte Carlo evaluation of V for sampler-only measures.
pub const MC_DRAWS: usize = 200_000;
const MC_SEED: u64 = 0x6d69_7874;
/// Smallest weight effective sample size at which a Monte Carlo V counts as resolved.
pub const MC_MIN_ESS: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub enum MixtureKind {
    /// Density α A^α κ^{−α−1} on [A, ∞).
    ShiftedPareto { alpha: f64, a: f64 },
    /// κ = K/√(2s), s ∝ e^{−s} s^{−1/2} p_{β/2}(s).
    TiltedStable { beta: f64, k: f64 },
    /// κ₁ with probability w, κ₂ otherwise.
    TwoPoint { k1: f64, k2: f64, w: f64 },
    /// Uniform over the atoms (sorted).
    Empirical { atoms: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct MixtureMeasure {
    kind: MixtureKind,
    norm: f64,
    median: OnceLock<f64>,
}

/// V(x) with an error estimate on V.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VEval {
    pub value: f64,
    pub error: f64,
    pub underflow: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MixtureSpec {
    /// Shifted Pareto built from an (α, ε) class: A = 1 + ε^{−1/2}.
    ParetoMixture { alpha: f64, eps: f64 },
    ShiftedPareto { alpha: f64, a: f64 },
    TiltedStable { beta: f64, k: f64 },
    TwoPoint { k1: f64, k2: f64, w: f64 },
    Empirical { atoms: Vec<f64> },
}

impl MixtureSpec {
    pub fn build(&self) -> Result<MixtureMeasure> {
        match self {
            MixtureSpec::ParetoMixture { alpha, eps } => MixtureMeasure::rho_alpha_eps(*alpha, *eps),
            MixtureSpec::ShiftedPareto { alpha, a } => MixtureMeasure::shifted_pareto(*alpha, *a),
            MixtureSpec::TiltedStable { beta, k } => MixtureMeasure::rho_tilted_stable(*beta, *k),
            MixtureSpec::TwoPoint { k1, k2, w } => MixtureMeasure::two_point(*k1, *k2, *w),
            MixtureSpec::Empirical { atoms } => MixtureMeasure::empirical(atoms.clone()),
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} must be a finite positive number")))
    }
}

fn ln_normal(x: f64, k: f64) -> f64 {
    -0.5 * (x / k).powi(2) - k.ln() - LN_SQRT_2PI
}

impl MixtureMeasure {
    fn from_kind(kind: MixtureKind) -> Self {
        let norm = match kind {
            MixtureKind::TiltedStable { beta, .. } => tilted_stable_normalizer(beta / 2.0),
            _ => 0.0,
        };
        MixtureMeasure { kind, norm, median: OnceLock::new() }
    }

    pub fn shifted_pareto(alpha: f64, a: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("A", a)?;
        Ok(Self::from_kind(MixtureKind::ShiftedPareto { alpha, a }))
    }

    /// Scale measure representing a V with V′ ≤ min(εx, (α+1)/x).
    pub fn rho_alpha_eps(alpha: f64, eps: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("eps", eps)?;
        Self::shifted_pareto(alpha, 1.0 + eps.powf(-0.5))
    }

    /// Scale measure of (1+(x/K)²)^{β/2}.
    pub fn rho_tilted_stable(beta: f64, k: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 2.0) {
            return Err(invalid("beta", format!("{beta} must lie in (0, 2)")));
        }
        positive("K", k)?;
        Ok(Self::from_kind(MixtureKind::TiltedStable { beta, k }))
    }

    pub fn two_point(k1: f64, k2: f64, w: f64) -> Result<Self> {
        positive("k1", k1)?;
        positive("k2", k2)?;
        if !(0.0..=1.0).contains(&w) {
            return Err(invalid("w", format!("{w} must lie in [0, 1]")));
        }
        Ok(Self::from_kind(MixtureKind::TwoPoint { k1, k2, w }))
    }

    pub fn empirical(mut atoms: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("atoms", "need at least one atom"));
        }
        for &a in &atoms {
            positive("atoms", a)?;
        }
        atoms.sort_by(f64::total_cmp);
        Ok(Self::from_kind(MixtureKind::Empirical { atoms }))
    }

    pub fn kind(&self) -> &MixtureKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            MixtureKind::ShiftedPareto { alpha, a } => format!("shifted-pareto({alpha}, {a})"),
            MixtureKind::TiltedStable { beta, k } => format!("tilted-stable({beta}, {k})"),
            MixtureKind::TwoPoint { k1, k2, w } => format!("two-point({k1}, {k2}, {w})"),
            MixtureKind::Empirical { atoms } => format!("empirical({} atoms)", atoms.len()),
        }
    }

    /// Lower end of the support.
    pub fn support_min(&self) -> f64 {
        match &self.kind {
            MixtureKind::ShiftedPareto { a, .. } => *a,
            MixtureKind::TiltedStable { .. } => 0.0,
            MixtureKind::TwoPoint { k1, k2, w } => {
                if *w == 0.0 {
                    *k2
                } else if *w == 1.0 {
                    *k1
                } else {
                    k1.min(*k2)
                }
            }
            MixtureKind::Empirical { atoms } => atoms[0],
        }
    }

    /// ρ((0, κ]) where available in closed form.
    pub fn cdf(&self, kappa: f64) -> Option<f64> {
        match &self.kind {
            MixtureKind::ShiftedPareto { alpha, a } => {
                Some(if kappa < *a { 0.0 } else { 1.0 - (a / kappa).powf(*alpha) })
            }
            MixtureKind::TwoPoint { k1, k2, w } => {
                Some(if kappa >= *k1 { *w } else { 0.0 } + if kappa >= *k2 { 1.0 - w } else { 0.0 })
            }
            MixtureKind::Empirical { atoms } => {
                Some(atoms.partition_point(|&x| x <= kappa) as f64 / atoms.len() as f64)
            }
            MixtureKind::TiltedStable { .. } => None,
        }
    }

    /// Density with respect to Lebesgue measure (shifted Pareto only).
    pub fn density(&self, kappa: f64) -> Option<f64> {
        match self.kind {
            MixtureKind::ShiftedPareto { alpha, a } => {
                Some(if kappa < a { 0.0 } else { alpha * a.powf(alpha) * kappa.powf(-alpha - 1.0) })
            }
            _ => None,
        }
    }

    /// Smallest κ with cdf(κ) ≥ p.
    pub fn quantile(&self, p: f64) -> Option<f64> {
        let p = p.clamp(0.0, 1.0);
        match &self.kind {
            MixtureKind::ShiftedPareto { alpha, a } => Some(a * (1.0 - p).powf(-1.0 / alpha)),
            MixtureKind::TwoPoint { k1, k2, w } => {
                let (lo, hi, wlo) = if k1 <= k2 { (*k1, *k2, *w) } else { (*k2, *k1, 1.0 - w) };
                Some(if wlo >= p && wlo > 0.0 { lo } else { hi })
            }
            MixtureKind::Empirical { atoms } => {
                let n = atoms.len();
                let i = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
                Some(atoms[i])
            }
            MixtureKind::TiltedStable { .. } => None,
        }
    }

    pub fn median(&self) -> f64 {
        *self.median.get_or_init(|| match self.quantile(0.5) {
            Some(m) => m,
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(MC_SEED);
                let mut s = self.sampler(&mut rng);
                let mut v: Vec<f64> = (0..20_001).map(|_| s.next(&mut rng)).collect();
                v.sort_by(f64::total_cmp);
                v[10_000]
            }
        })
    }

    /// ∫ κ⁻¹ dρ(κ).
    pub fn inverse_moment(&self) -> f64 {
        match &self.kind {
            MixtureKind::ShiftedPareto { alpha, a } => alpha / ((alpha + 1.0) * a),
            MixtureKind::TwoPoint { k1, k2, w } => w / k1 + (1.0 - w) / k2,
            MixtureKind::Empirical { atoms } => atoms.iter().map(|k| 1.0 / k).sum::<f64>() / atoms.len() as f64,
            // E[√(2s)]/K = √2 E_p[e^{−S}] / (K Z)
            MixtureKind::TiltedStable { k, .. } => 2f64.sqrt() * (-1f64).exp() / (k * self.norm),
        }
    }

    /// ∫ κ² dρ(κ) (infinite for α ≤ 2).
    pub fn second_moment(&self) -> f64 {
        match &self.kind {
            MixtureKind::ShiftedPareto { alpha, a } => {
                if *alpha <= 2.0 {
                    f64::INFINITY
                } else {
                    alpha * a * a / (alpha - 2.0)
                }
            }
            MixtureKind::TwoPoint { k1, k2, w } => w * k1 * k1 + (1.0 - w) * k2 * k2,
            MixtureKind::Empirical { atoms } => atoms.iter().map(|k| k * k).sum::<f64>() / atoms.len() as f64,
            MixtureKind::TiltedStable { .. } => f64::INFINITY,
        }
    }

    pub fn sampler<R: Rng + ?Sized>(&self, rng: &mut R) -> KappaSampler {
        match &self.kind {
            MixtureKind::TiltedStable { beta, k } => {
                KappaSampler { kind: self.kind.clone(), chain: Some(TiltChain::new(beta / 2.0, rng)), scale: *k }
            }
            _ => KappaSampler { kind: self.kind.clone(), chain: None, scale: 1.0 },
        }
    }

    pub fn sample_many<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let mut s = self.sampler(rng);
        (0..n).map(|_| s.next(rng)).collect()
    }

    /// V(x) = −ln ∫ N(x; κ²) dρ(κ) from closed forms (incomplete gamma for the
    /// Pareto kind, the defining formula for the tilted-stable kind).
    pub fn v_exact(&self, x: f64) -> f64 {
        let x = x.abs();
        match &self.kind {
            MixtureKind::ShiftedPareto { alpha, a } => {
                let s = 0.5 * (alpha + 1.0);
                let u = x * x / (2.0 * a * a);
                let ln_c = alpha.ln() + alpha * a.ln() + 0.5 * (alpha - 1.0) * 2f64.ln() - LN_SQRT_2PI;
                -(ln_c - s * (2.0 * a * a).ln() + ln_lower_gamma_scaled(s, u))
            }
            MixtureKind::TwoPoint { k1, k2, w } => {
                -log_sum_exp(&[w.ln() + ln_normal(x, *k1), (1.0 - w).ln() + ln_normal(x, *k2)])
            }
            MixtureKind::Empirical { atoms } => {
                let l: Vec<f64> = atoms.iter().map(|&k| ln_normal(x, k)).collect();
                -(log_sum_exp(&l) - (atoms.len() as f64).ln())
            }
            MixtureKind::TiltedStable { beta, k } => {
                (1.0 + (x / k).powi(2)).powf(beta / 2.0) + (k * PI.sqrt() * self.norm).ln()
            }
        }
    }

    pub fn eval_v(&self, x: f64) -> VEval {
        self.eval_v_many(&[x])[0]
    }

    /// V on a grid by quadrature (Pareto), exact sums (atomic kinds) or
    /// Monte Carlo with common draws (tilted stable).
    pub fn eval_v_many(&self, xs: &[f64]) -> Vec<VEval> {
        match &self.kind {
            MixtureKind::ShiftedPareto { alpha, a } => xs.iter().map(|&x| pareto_quadrature(*alpha, *a, x)).collect(),
            MixtureKind::TwoPoint { .. } | MixtureKind::Empirical { .. } => xs
                .iter()
                .map(|&x| {
                    let v = self.v_exact(x);
                    VEval { value: v, error: 1e-14 * (1.0 + v.abs()), underflow: !v.is_finite() }
                })
                .collect(),
            MixtureKind::TiltedStable { .. } => self.eval_v_mc(xs, MC_DRAWS, MC_SEED),
        }
    }

    /// Monte Carlo V with batch-means errors, in log space. Points whose
    /// weights have an effective sample size below `MC_MIN_ESS` are flagged
    /// as unresolved.
    pub fn eval_v_mc(&self, xs: &[f64], draws: usize, seed: u64) -> Vec<VEval> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kappas = self.sample_many(draws, &mut rng);
        let batches = 100;
        let per = draws / batches;
        xs.iter()
            .map(|&x| {
                let logs: Vec<f64> = kappas.iter().map(|&k| ln_normal(x, k)).collect();
                let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
                let sum: f64 = w.iter().sum();
                let ess = sum * sum / w.iter().map(|v| v * v).sum::<f64>();
                if !top.is_finite() || ess < MC_MIN_ESS {
                    return VEval { value: f64::INFINITY, error: f64::INFINITY, underflow: true };
                }
                let mean = sum / draws as f64;
                let bm: Vec<f64> = w.chunks(per).take(batches).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
                let bmean = bm.iter().sum::<f64>() / batches as f64;
                let var = bm.iter().map(|b| (b - bmean).powi(2)).sum::<f64>() / (batches - 1) as f64;
                let se = (var / batches as f64).sqrt();
                VEval { value: -(top + mean.ln()), error: se / mean, underflow: false }
            })
            .collect()
    }

    /// V′(x) as the ratio x ∫κ^{−α−4}e^{−x²/2κ²} / ∫κ^{−α−2}e^{−x²/2κ²} (Pareto kind).
    pub fn eval_v_prime(&self, x: f64) -> Option<f64> {
        let MixtureKind::ShiftedPareto { alpha, a } = self.kind else {
            return None;
        };
        let part = |p: f64| -> f64 {
            // ∫_A^∞ κ^{−p} e^{−x²/2κ²} dκ, in u = ln κ
            let lg = |u: f64| -(p - 1.0) * u - 0.5 * x * x * (-2.0 * u).exp();
            let lo = a.ln();
            let hi = (a * 1e6).max(1e3 * x).ln();
            let peak = (0.5 * (x * x / (p - 1.0)).ln()).clamp(lo, hi);
            let m = lg(peak);
            let r = integrate(|u| (lg(u) - m).exp(), lo, hi, 0.0, 1e-13);
            r.value.ln() + m
        };
        Some(x * (part(alpha + 4.0) - part(alpha + 2.0)).exp())
    }

    /// Exact draw from κ⁻¹ e^{−δ²/2κ²} dρ(κ), normalized.
    pub fn sample_posterior<R: Rng + ?Sized>(&self, delta: f64, rng: &mut R) -> Result<f64> {
        match &self.kind {
            MixtureKind::ShiftedPareto { alpha, a } => {
                let shape = 0.5 * (alpha + 1.0);
                let t_max = 1.0 / (a * a);
                let rate = 0.5 * delta * delta;
                let t = if rate * t_max <= 1.0 {
                    loop {
                        let u: f64 = rng.random();
                        let t = t_max * u.powf(1.0 / shape);
                        let v: f64 = rng.random();
                        if v < (-rate * t).exp() {
                            break t;
                        }
                    }
                } else {
                    let pt = gamma_p(shape, rate * t_max);
                    loop {
                        let u: f64 = rng.random();
                        let t = inv_gamma_p(shape, u * pt) / rate;
                        if t > 0.0 && t <= t_max {
                            break t;
                        }
                    }
                };
                Ok(t.powf(-0.5))
            }
            MixtureKind::TwoPoint { k1, k2, w } => {
                let l1 = w.ln() + ln_normal(delta, *k1);
                let l2 = (1.0 - w).ln() + ln_normal(delta, *k2);
                let p1 = 1.0 / (1.0 + (l2 - l1).exp());
                let u: f64 = rng.random();
                Ok(if u < p1 { *k1 } else { *k2 })
            }
            MixtureKind::Empirical { atoms } => {
                let l: Vec<f64> = atoms.iter().map(|&k| ln_normal(delta, k)).collect();
                let m = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let w: Vec<f64> = l.iter().map(|x| (x - m).exp()).collect();
                let total: f64 = w.iter().sum();
                let mut u: f64 = rng.random::<f64>() * total;
                for (i, wi) in w.iter().enumerate() {
                    if u < *wi {
                        return Ok(atoms[i]);
                    }
                    u -= wi;
                }
                Ok(*atoms.last().unwrap())
            }
            MixtureKind::TiltedStable { .. } => {
                Err(Error::Unsupported("posterior sampling needs a closed-form or atomic measure".into()))
            }
        }
    }

    pub fn supports_posterior(&self) -> bool {
        !matches!(self.kind, MixtureKind::TiltedStable { .. })
    }
}

fn pareto_quadrature(alpha: f64, a: f64, x: f64) -> VEval {
    let x = x.abs();
    let ln_c = alpha.ln() + alpha * a.ln() - LN_SQRT_2PI;
    let lg = |u: f64| ln_c - (alpha + 1.0) * u - 0.5 * x * x * (-2.0 * u).exp();
    let lo = a.ln();
    let b = (a * 1e6).max(1e3 * x);
    let hi = b.ln();
    let peak = if x > 0.0 { (0.5 * (x * x / (alpha + 1.0)).ln()).clamp(lo, hi) } else { lo };
    let m = lg(peak);
    let r = integrate(|u| (lg(u) - m).exp(), lo, hi, 0.0, 1e-12);
    // ∫_B^∞ lies in [T e^{−x²/2B²}, T]
    let t = ln_c.exp() * b.powf(-alpha - 1.0) / (alpha + 1.0);
    let t_lo = t * (-0.5 * (x / b).powi(2)).exp();
    let tail = 0.5 * (t + t_lo) * (-m).exp();
    let tail_err = 0.5 * (t - t_lo) * (-m).exp();
    let total = r.value + tail;
    if !(total > 0.0) || !total.is_finite() {
        return VEval { value: f64::INFINITY, error: f64::INFINITY, underflow: true };
    }
    let value = -(total.ln() + m);
    VEval { value, error: (r.error + tail_err) / total + 1e-15 * value.abs(), underflow: !value.is_finite() }
}

/// Stateful κ sampler; i.i.d. for most kinds, a thinned chain for the tilted-stable kind.
#[derive(Debug, Clone)]
pub struct KappaSampler {
    kind: MixtureKind,
    chain: Option<TiltChain>,
    scale: f64,
}

impl KappaSampler {
    pub fn next<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        if let Some(c) = &mut self.chain {
            let s = c.next(rng);
            return self.scale / (2.0 * s).sqrt();
        }
        match &self.kind {
            MixtureKind::ShiftedPareto { alpha, a } => {
                let u: f64 = rng.random();
                a * (1.0 - u).powf(-1.0 / alpha)
            }
            MixtureKind::TwoPoint { k1, k2, w } => {
                if rng.random::<f64>() < *w {
                    *k1
                } else {
                    *k2
                }
            }
            MixtureKind::Empirical { atoms } => atoms[rng.random_range(0..atoms.len())],
            MixtureKind::TiltedStable { .. } => unreachable!("tilted kind carries a chain"),
        }
    }

    /// Acceptance rate of the tilt chain, if any.
    pub fn acceptance(&self) -> Option<f64> {
        self.chain.as_ref().map(|c| c.accepted as f64 / c.proposed.max(1) as f64)
    }
}
