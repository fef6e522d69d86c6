//! Even potentials, monotonicity classes and Gaussian-mixture decompositions.

mod decompose;
mod mixture;
mod stable;

pub use decompose::{decompose, decompose_with_tolerance, Decomposition};
pub use mixture::{KappaSampler, MixtureKind, MixtureMeasure, MixtureSpec, VEval};
pub use stable::{sample_positive_stable, tilted_stable_normalizer};

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum MonotoneClass {
    Eps { eps: f64 },
    AlphaEps { alpha: f64, eps: f64 },
    BetaPoly { beta: f64, eps: f64 },
    Explicit,
}

impl MonotoneClass {
    /// Required lower bound on U′(x), x > 0.
    pub fn lower_bound(&self, x: f64) -> f64 {
        match *self {
            MonotoneClass::Eps { eps } => (eps * x).min((1.0 + eps) / x),
            MonotoneClass::AlphaEps { alpha, eps } => (eps * x).min((alpha + 1.0) / x),
            MonotoneClass::BetaPoly { beta, eps } => eps * x.min(x.powf(beta - 1.0)),
            MonotoneClass::Explicit => 0.0,
        }
    }
}

pub trait Potential: Debug + Send + Sync {
    /// U(x), normalized so U(0) = 0.
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, _x: f64) -> Option<f64> {
        None
    }
    fn class(&self) -> MonotoneClass;
    fn name(&self) -> String;
}

pub fn numeric_derivative(u: &dyn Potential, x: f64) -> f64 {
    let h = 1e-6 * x.abs().max(1.0);
    (u.value(x + h) - u.value(x - h)) / (2.0 * h)
}

pub fn derivative(u: &dyn Potential, x: f64) -> f64 {
    u.derivative(x).unwrap_or_else(|| numeric_derivative(u, x))
}

#[derive(Debug, Clone, Copy)]
pub struct Quadratic {
    pub stiffness: f64,
}

impl Potential for Quadratic {
    fn value(&self, x: f64) -> f64 {
        0.5 * self.stiffness * x * x
    }
    fn derivative(&self, x: f64) -> Option<f64> {
        Some(self.stiffness * x)
    }
    fn class(&self) -> MonotoneClass {
        MonotoneClass::Explicit
    }
    fn name(&self) -> String {
        format!("quadratic({})", self.stiffness)
    }
}

/// Constant potential, stored as U ≡ 0.
#[derive(Debug, Clone, Copy)]
pub struct Flat;

impl Potential for Flat {
    fn value(&self, _x: f64) -> f64 {
        0.0
    }
    fn derivative(&self, _x: f64) -> Option<f64> {
        Some(0.0)
    }
    fn class(&self) -> MonotoneClass {
        MonotoneClass::Explicit
    }
    fn name(&self) -> String {
        "constant".into()
    }
}

/// U′(x) = min(εx, (α+1)/x): quadratic up to x* = √((α+1)/ε), logarithmic after.
#[derive(Debug, Clone, Copy)]
pub struct Splice {
    pub alpha: f64,
    pub eps: f64,
}

impl Splice {
    pub fn new(alpha: f64, eps: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid("alpha", format!("{alpha} must be > 0")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid("eps", format!("{eps} must be > 0")));
        }
        Ok(Splice { alpha, eps })
    }

    pub fn knee(&self) -> f64 {
        ((self.alpha + 1.0) / self.eps).sqrt()
    }
}

impl Potential for Splice {
    fn value(&self, x: f64) -> f64 {
        let x = x.abs();
        let k = self.knee();
        if x <= k {
            0.5 * self.eps * x * x
        } else {
            0.5 * (self.alpha + 1.0) + (self.alpha + 1.0) * (x / k).ln()
        }
    }
    fn derivative(&self, x: f64) -> Option<f64> {
        let a = x.abs();
        Some(x.signum() * (self.eps * a).min((self.alpha + 1.0) / a))
    }
    fn class(&self) -> MonotoneClass {
        MonotoneClass::AlphaEps { alpha: self.alpha, eps: self.eps }
    }
    fn name(&self) -> String {
        format!("splice({}, {})", self.alpha, self.eps)
    }
}

/// U′(x) = ε min(x, x^{β−1}).
#[derive(Debug, Clone, Copy)]
pub struct PolySplice {
    pub beta: f64,
    pub eps: f64,
}

impl PolySplice {
    pub fn new(beta: f64, eps: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(invalid("beta", format!("{beta} must lie in (0, 2]")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid("eps", format!("{eps} must be > 0")));
        }
        Ok(PolySplice { beta, eps })
    }
}

impl Potential for PolySplice {
    fn value(&self, x: f64) -> f64 {
        let x = x.abs();
        if x <= 1.0 || self.beta == 2.0 {
            0.5 * self.eps * x * x
        } else {
            self.eps * (0.5 + (x.powf(self.beta) - 1.0) / self.beta)
        }
    }
    fn derivative(&self, x: f64) -> Option<f64> {
        let a = x.abs();
        Some(x.signum() * self.eps * a.min(a.powf(self.beta - 1.0)))
    }
    fn class(&self) -> MonotoneClass {
        MonotoneClass::BetaPoly { beta: self.beta, eps: self.eps }
    }
    fn name(&self) -> String {
        format!("poly-splice({}, {})", self.beta, self.eps)
    }
}

/// (1+(x/K)²)^{β/2} − 1.
#[derive(Debug, Clone, Copy)]
pub struct PowerGrowth {
    pub beta: f64,
    pub k: f64,
}

impl PowerGrowth {
    pub fn new(beta: f64, k: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 2.0) {
            return Err(invalid("beta", format!("{beta} must lie in (0, 2)")));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(invalid("K", format!("{k} must be > 0")));
        }
        Ok(PowerGrowth { beta, k })
    }

    /// Largest ε with U′(x) ≥ ε min(x, x^{β−1}).
    pub fn class_eps(&self) -> f64 {
        self.beta * self.k.powf(-self.beta) * (1.0 + self.k * self.k).powf(0.5 * self.beta - 1.0)
    }

    /// ε with U′(x) ≤ ε min(x, x^{β−1}); a (β, ε)-poly potential then dominates it.
    pub fn dominating_eps(&self) -> f64 {
        self.beta * self.k.powf(-self.beta)
    }
}

impl Potential for PowerGrowth {
    fn value(&self, x: f64) -> f64 {
        let r = x / self.k;
        (1.0 + r * r).powf(0.5 * self.beta) - 1.0
    }
    fn derivative(&self, x: f64) -> Option<f64> {
        let r = x / self.k;
        Some(self.beta * x / (self.k * self.k) * (1.0 + r * r).powf(0.5 * self.beta - 1.0))
    }
    fn class(&self) -> MonotoneClass {
        MonotoneClass::BetaPoly { beta: self.beta, eps: self.class_eps() }
    }
    fn name(&self) -> String {
        format!("power-growth({}, {})", self.beta, self.k)
    }
}

/// The mixture potential V of a measure, shifted to vanish at 0.
#[derive(Debug, Clone)]
pub struct MixturePotential {
    rho: MixtureMeasure,
    v0: f64,
}

impl MixturePotential {
    pub fn new(rho: MixtureMeasure) -> Self {
        let v0 = rho.v_exact(0.0);
        MixturePotential { rho, v0 }
    }
}

impl Potential for MixturePotential {
    fn value(&self, x: f64) -> f64 {
        self.rho.v_exact(x) - self.v0
    }
    fn class(&self) -> MonotoneClass {
        MonotoneClass::Explicit
    }
    fn name(&self) -> String {
        format!("mixture[{}]", self.rho.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub pass: bool,
    pub worst_x: f64,
    /// min over the grid of U′(x) − bound(x).
    pub margin: f64,
    pub violations: usize,
}

pub fn check_class(u: &dyn Potential, class: &MonotoneClass, grid: &[f64]) -> ClassReport {
    let mut worst = (f64::INFINITY, f64::NAN);
    let mut violations = 0;
    for &x in grid {
        let b = class.lower_bound(x);
        let m = derivative(u, x) - b;
        if m < -1e-6 * (1.0 + b.abs()) {
            violations += 1;
        }
        if m < worst.0 {
            worst = (m, x);
        }
    }
    ClassReport { pass: violations == 0, worst_x: worst.1, margin: worst.0, violations }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Quadratic { stiffness: f64 },
    Splice { alpha: f64, eps: f64 },
    PolySplice { beta: f64, eps: f64 },
    PowerGrowth { beta: f64, k: f64 },
    Constant,
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        self.build().map(|_| ())
    }

    pub fn build(&self) -> Result<Arc<dyn Potential>> {
        Ok(match *self {
            PotentialSpec::Quadratic { stiffness } => {
                if !(stiffness > 0.0 && stiffness.is_finite()) {
                    return Err(invalid("stiffness", format!("{stiffness} must be > 0")));
                }
                Arc::new(Quadratic { stiffness })
            }
            PotentialSpec::Splice { alpha, eps } => Arc::new(Splice::new(alpha, eps)?),
            PotentialSpec::PolySplice { beta, eps } => Arc::new(PolySplice::new(beta, eps)?),
            PotentialSpec::PowerGrowth { beta, k } => Arc::new(PowerGrowth::new(beta, k)?),
            PotentialSpec::Constant => Arc::new(Flat),
        })
    }
}

/// Log-spaced grid of `n` points on [lo, hi].
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp()).collect()
}
