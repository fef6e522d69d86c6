use serde::{Deserialize, Serialize};

use super::integrated_autocorrelation;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MaxNormalization {
    /// (log n)^{1/β}
    LogPower { beta: f64 },
    /// n^{1/(Dα)}
    VolumePower { d: f64, alpha: f64 },
}

impl MaxNormalization {
    pub fn scale(&self, n: usize) -> f64 {
        match *self {
            MaxNormalization::LogPower { beta } => (n as f64).ln().powf(1.0 / beta),
            MaxNormalization::VolumePower { d, alpha } => (n as f64).powf(1.0 / (d * alpha)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxScalingReport {
    pub normalization: MaxNormalization,
    /// Box volumes |Λ_i|, strictly increasing.
    pub sizes: Vec<usize>,
    pub normalized: Vec<Vec<f64>>,
    pub medians: Vec<f64>,
    /// Slope of the normalized medians against log n.
    pub slope: f64,
    /// max/min of the normalized medians minus one.
    pub spread: f64,
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len();
    if m % 2 == 1 { s[m / 2] } else { 0.5 * (s[m / 2 - 1] + s[m / 2]) }
}

fn fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b, if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) })
}

/// Keeps every ⌈5 τ_int⌉-th element of a chain series.
pub fn thin_by_autocorrelation(series: &[f64]) -> Vec<f64> {
    let step = (5.0 * integrated_autocorrelation(series)).ceil().max(1.0) as usize;
    series.iter().step_by(step).copied().collect()
}

/// Normalized maximum statistics over a family of boxes, given (|Λ|, samples of max |φ|).
pub fn max_scaling(entries: &[(usize, Vec<f64>)], normalization: MaxNormalization) -> Result<MaxScalingReport> {
    if entries.len() < 3 {
        return Err(invalid("entries", "need at least 3 box sizes"));
    }
    if entries.windows(2).any(|w| w[0].0 >= w[1].0) || entries[0].0 < 2 {
        return Err(invalid("entries", "box volumes must be strictly increasing and at least 2"));
    }
    if let Some((n, _)) = entries.iter().find(|(_, s)| s.len() < 50) {
        return Err(invalid("entries", format!("box of volume {n} has fewer than 50 samples")));
    }
    let normalized: Vec<Vec<f64>> = entries
        .iter()
        .map(|(n, s)| {
            let c = normalization.scale(*n);
            s.iter().map(|x| x / c).collect()
        })
        .collect();
    let medians: Vec<f64> = normalized.iter().map(|v| median(v)).collect();
    let x: Vec<f64> = entries.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let (_, slope, _) = fit(&x, &medians);
    let lo = medians.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = medians.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MaxScalingReport {
        normalization,
        sizes: entries.iter().map(|e| e.0).collect(),
        normalized,
        medians,
        slope,
        spread: hi / lo - 1.0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceGrowthReport {
    pub ls: Vec<usize>,
    pub variances: Vec<f64>,
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
}

impl VarianceGrowthReport {
    /// Smallest c with Var(L) ≤ c log L at every size.
    pub fn log_constant(&self) -> f64 {
        self.ls.iter().zip(&self.variances).map(|(&l, v)| v / (l as f64).ln()).fold(0.0, f64::max)
    }
}

/// Linear fit of Var φ(0) against log L.
pub fn variance_growth(entries: &[(usize, f64)]) -> Result<VarianceGrowthReport> {
    if entries.len() < 4 {
        return Err(invalid("entries", "need at least 4 box sizes"));
    }
    if entries.iter().any(|&(l, v)| l < 2 || !v.is_finite()) {
        return Err(invalid("entries", "sizes must be ≥ 2 with finite variances"));
    }
    let x: Vec<f64> = entries.iter().map(|(l, _)| (*l as f64).ln()).collect();
    let y: Vec<f64> = entries.iter().map(|e| e.1).collect();
    let (intercept, slope, r2) = fit(&x, &y);
    Ok(VarianceGrowthReport { ls: entries.iter().map(|e| e.0).collect(), variances: y, intercept, slope, r2 })
}
