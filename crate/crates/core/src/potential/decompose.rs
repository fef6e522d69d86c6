use std::sync::Arc;

use super::{MixtureMeasure, Potential};
use crate::error::{invalid, Error, Result};

/// U = V + W with V the mixture potential of ρ and W(0) = 0.
#[derive(Debug, Clone)]
pub struct Decomposition {
    potential: Arc<dyn Potential>,
    rho: MixtureMeasure,
    v0_exact: f64,
    /// Verification grid, starting at 0.
    pub grid: Vec<f64>,
    /// V(x) − V(0) on the grid from quadrature or Monte Carlo.
    pub v: Vec<f64>,
    pub v_error: Vec<f64>,
    /// Points where the numerical integral underflowed and V came from the closed form.
    pub closed_form: Vec<bool>,
    pub w: Vec<f64>,
    /// V(0); the additive constant dropped from U.
    pub constant: f64,
    /// Largest decrease of W between neighbouring grid points, net of the
    /// numerical error allowance (≤ tolerance when accepted).
    pub max_violation: f64,
    pub worst_at: f64,
    pub tolerance: f64,
}

impl Decomposition {
    pub fn potential(&self) -> &Arc<dyn Potential> {
        &self.potential
    }

    pub fn rho(&self) -> &MixtureMeasure {
        &self.rho
    }

    /// V(x) − V(0) from the measure's closed form.
    pub fn v_at(&self, x: f64) -> f64 {
        self.rho.v_exact(x) - self.v0_exact
    }

    pub fn w_at(&self, x: f64) -> f64 {
        self.potential.value(x) - self.v_at(x)
    }
}

pub fn decompose(u: Arc<dyn Potential>, rho: &MixtureMeasure, grid: &[f64]) -> Result<Decomposition> {
    decompose_with_tolerance(u, rho, grid, 1e-8)
}

pub fn decompose_with_tolerance(
    u: Arc<dyn Potential>,
    rho: &MixtureMeasure,
    grid: &[f64],
    tol: f64,
) -> Result<Decomposition> {
    if grid.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(invalid("grid", "points must be finite and positive"));
    }
    let mut xs = vec![0.0];
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    xs.extend(g);
    let ev = rho.eval_v_many(&xs);
    if ev[0].underflow {
        return Err(Error::NumericalUnderflow(0.0));
    }
    let v0 = ev[0].value;
    let v0_exact = rho.v_exact(0.0);
    let closed_form: Vec<bool> = ev.iter().map(|e| e.underflow).collect();
    let v: Vec<f64> = ev
        .iter()
        .zip(&xs)
        .map(|(e, &x)| if e.underflow { rho.v_exact(x) - v0_exact } else { e.value - v0 })
        .collect();
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NumericalUnderflow(xs[i]));
    }
    let v_error: Vec<f64> = ev.iter().map(|e| if e.underflow { 0.0 } else { e.error }).collect();
    let w: Vec<f64> = xs.iter().zip(&v).map(|(&x, &vx)| u.value(x) - vx).collect();
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst_at = 0.0;
    for i in 0..xs.len() - 1 {
        let drop = w[i] - w[i + 1];
        let slack = 3.0 * (v_error[i] + v_error[i + 1]);
        if drop - slack > max_violation {
            max_violation = drop - slack;
            worst_at = xs[i + 1];
        }
        if drop > tol + slack {
            return Err(Error::DecompositionFails { at: xs[i + 1], drop, tol: tol + slack });
        }
    }
    Ok(Decomposition {
        potential: u,
        v0_exact,
        rho: rho.clone(),
        grid: xs,
        v,
        v_error,
        closed_form,
        w,
        constant: v0,
        max_violation,
        worst_at,
        tolerance: tol,
    })
}
