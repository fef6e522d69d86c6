use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{invalid, Error, Result};

pub const MIN_SAMPLES: usize = 10_000;
pub const MIN_EXCEEDANCES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailModel {
    Power,
    Stretched,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub model: TailModel,
    pub samples: usize,
    pub thresholds: Vec<f64>,
    /// P̂[|x| ≥ t] at each threshold; the first threshold is 0.
    pub survival: Vec<f64>,
    /// α̂ (Hill) for power fits, β̂ for stretched fits.
    pub exponent: f64,
    pub band: (f64, f64),
    pub exceedances: usize,
    /// Power fits: −slope of log Ŝ against log t over the top order statistics.
    pub loglog_slope: Option<f64>,
    /// Stretched fits: slope of log(−log Ŝ) against log t over the upper tail.
    pub survival_slope: Option<f64>,
}

impl TailReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,survival\n");
        for (t, p) in self.thresholds.iter().zip(&self.survival) {
            let _ = writeln!(s, "{t:e},{p:e}");
        }
        s
    }
}

fn sorted_abs(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.len() < MIN_SAMPLES {
        return Err(invalid("samples", format!("{} given, at least {MIN_SAMPLES} required", samples.len())));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(invalid("samples", "non-finite value"));
    }
    let mut a: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    a.sort_by(f64::total_cmp);
    Ok(a)
}

/// P̂[|x| ≥ t] from ascending absolute values.
fn survival_at(sorted: &[f64], t: f64) -> f64 {
    let below = sorted.partition_point(|&x| x < t);
    (sorted.len() - below) as f64 / sorted.len() as f64
}

fn survival_curve(sorted: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = sorted.len();
    let lo = sorted[n / 100].max(f64::MIN_POSITIVE);
    let hi = sorted[n - 1];
    let mut t = vec![0.0];
    if hi > lo {
        t.extend((0..40).map(|i| lo * (hi / lo).powf(i as f64 / 39.0)));
    }
    let s = t.iter().map(|&x| survival_at(sorted, x)).collect();
    (t, s)
}

fn regress(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

fn hill(desc: &[f64], k: usize) -> f64 {
    let xk = desc[k];
    k as f64 / desc[..k].iter().map(|x| (x / xk).ln()).sum::<f64>()
}

/// Geometric thresholds from the 95% quantile to the 50th largest value, with Ŝ there.
fn upper_tail_points(sorted: &[f64]) -> Vec<(f64, f64)> {
    let n = sorted.len();
    let (lo, hi) = (sorted[n * 95 / 100], sorted[n - 50]);
    if !(hi > lo) || lo <= 0.0 {
        return Vec::new();
    }
    (0..40)
        .map(|i| lo * (hi / lo).powf(i as f64 / 39.0))
        .map(|t| (t, survival_at(sorted, t)))
        .filter(|&(_, s)| s > 0.0 && s < 1.0)
        .collect()
}

/// Residual sums of squares of log Ŝ under the power and stretched regressions.
fn selection_rss(sorted: &[f64]) -> (f64, f64) {
    let pts = upper_tail_points(sorted);
    if pts.len() < 3 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ls: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let lls: Vec<f64> = ls.iter().map(|s| (-s).ln()).collect();
    let (a, b) = regress(&lx, &ls);
    let rss_p = lx.iter().zip(&ls).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    let (a, b) = regress(&lx, &lls);
    let rss_s = lx.iter().zip(&ls).map(|(x, y)| (y + (a + b * x).exp()).powi(2)).sum();
    (rss_p, rss_s)
}

/// Power or stretched, whichever regression leaves the smaller residual variance.
pub fn select_tail_model(samples: &[f64]) -> Result<TailModel> {
    let sorted = sorted_abs(samples)?;
    let (p, s) = selection_rss(&sorted);
    Ok(if p <= s { TailModel::Power } else { TailModel::Stretched })
}

/// Hill estimator on the top 5% order statistics, plus the log-log survival slope.
pub fn fit_power_tail(samples: &[f64]) -> Result<TailReport> {
    let sorted = sorted_abs(samples)?;
    let n = sorted.len();
    let k = n / 20;
    let desc: Vec<f64> = sorted.iter().rev().copied().collect();
    let positive = desc.iter().take(k + 1).filter(|&&x| x > 0.0).count();
    if k < MIN_EXCEEDANCES || positive <= k {
        return Err(Error::InsufficientExceedances { found: k.min(positive), needed: MIN_EXCEEDANCES });
    }
    let alpha = hill(&desc, k);
    let half = 1.96 * alpha / (k as f64).sqrt();
    let lx: Vec<f64> = desc[..k].iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = (1..=k).map(|i| (i as f64 / n as f64).ln()).collect();
    let (_, slope) = regress(&lx, &ly);
    let (t, s) = survival_curve(&sorted);
    Ok(TailReport {
        model: TailModel::Power,
        samples: n,
        thresholds: t,
        survival: s,
        exponent: alpha,
        band: (alpha - half, alpha + half),
        exceedances: k,
        loglog_slope: Some(-slope),
        survival_slope: None,
    })
}

/// Weighted least squares of log f̂ on (1, log t, −t^β) for each β on a grid; returns (β, rss).
fn profile_beta(sorted: &[f64]) -> Option<(f64, f64)> {
    let n = sorted.len();
    let lo = sorted[n / 10];
    let hi = sorted[n - 100];
    if !(lo > 0.0 && hi > lo) {
        return None;
    }
    let bins = 30;
    let edges: Vec<f64> = (0..=bins).map(|i| lo * (hi / lo).powf(i as f64 / bins as f64)).collect();
    let mut pts = Vec::new();
    for w in edges.windows(2) {
        let c = sorted.partition_point(|&x| x < w[1]) - sorted.partition_point(|&x| x < w[0]);
        if c > 0 {
            let f = c as f64 / (n as f64 * (w[1] - w[0]));
            pts.push(((w[0] * w[1]).sqrt(), f.ln(), c as f64));
        }
    }
    if pts.len() < 5 {
        return None;
    }
    let mut best: Option<(f64, f64)> = None;
    let mut beta = 0.1;
    while beta <= 3.0 + 1e-9 {
        let mut a = Matrix3::zeros();
        let mut b = Vector3::zeros();
        for &(t, y, w) in &pts {
            let row = Vector3::new(1.0, t.ln(), -t.powf(beta));
            a += w * row * row.transpose();
            b += w * y * row;
        }
        if let Some(sol) = a.try_inverse().map(|inv| inv * b) {
            if sol[2] > 0.0 {
                let rss: f64 = pts
                    .iter()
                    .map(|&(t, y, w)| w * (y - sol[0] - sol[1] * t.ln() + sol[2] * t.powf(beta)).powi(2))
                    .sum();
                if best.map_or(true, |(_, r)| rss < r) {
                    best = Some((beta, rss));
                }
            }
        }
        beta += 0.005;
    }
    best
}

/// Stretched-exponential exponent β from a profile fit of the log-density to
/// a + γ log t − c t^β over the upper 90% of |x|.
pub fn fit_stretched_tail(samples: &[f64]) -> Result<TailReport> {
    let sorted = sorted_abs(samples)?;
    let n = sorted.len();
    let k = n / 10;
    if k < MIN_EXCEEDANCES {
        return Err(Error::InsufficientExceedances { found: k, needed: MIN_EXCEEDANCES });
    }
    let (beta, _) = profile_beta(&sorted).ok_or(Error::InsufficientExceedances { found: 0, needed: MIN_EXCEEDANCES })?;
    let mut halves = Vec::new();
    for par in 0..2 {
        let mut h: Vec<f64> = sorted.iter().skip(par).step_by(2).copied().collect();
        h.sort_by(f64::total_cmp);
        if let Some((b, _)) = profile_beta(&h) {
            halves.push(b);
        }
    }
    let band = halves.iter().fold((beta, beta), |(lo, hi), &b| (lo.min(b), hi.max(b)));
    let pts: Vec<(f64, f64)> = {
        let (lo, hi) = (sorted[n * 9 / 10], sorted[n - 100]);
        (0..30)
            .map(|i| lo * (hi / lo).powf(i as f64 / 29.0))
            .map(|t| (t, survival_at(&sorted, t)))
            .filter(|&(t, s)| t > 0.0 && s > 0.0 && s < 1.0)
            .collect()
    };
    let survival_slope = (pts.len() >= 3).then(|| {
        let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
        let ly: Vec<f64> = pts.iter().map(|p| (-p.1.ln()).ln()).collect();
        regress(&lx, &ly).1
    });
    let (t, s) = survival_curve(&sorted);
    Ok(TailReport {
        model: TailModel::Stretched,
        samples: n,
        thresholds: t,
        survival: s,
        exponent: beta,
        band,
        exceedances: k,
        loglog_slope: None,
        survival_slope,
    })
}

/// The fit chosen by `select_tail_model`.
pub fn fit_tail(samples: &[f64]) -> Result<TailReport> {
    match select_tail_model(samples)? {
        TailModel::Power => fit_power_tail(samples),
        TailModel::Stretched => fit_stretched_tail(samples),
    }
}
