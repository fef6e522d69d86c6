use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::special::integrate_to_inf;

/// Positive a-stable variable with E e^{−λS} = e^{−λ^a}, 0 < a < 1 (Kanter's representation).
pub fn sample_positive_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    let u = PI * loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break u;
        }
    };
    let e: f64 = Exp1.sample(rng);
    let left = (a * u).sin() / u.sin().powf(1.0 / a);
    let right = (((1.0 - a) * u).sin() / e).powf((1.0 - a) / a);
    left * right
}

/// Z = E[e^{−S} S^{−1/2}] = (2/√π) ∫₀^∞ e^{−(1+w²)^a} dw.
pub fn tilted_stable_normalizer(a: f64) -> f64 {
    let r = integrate_to_inf(|w| (-(1.0 + w * w).powf(a)).exp(), 0.0, 1e-15, 1e-13);
    2.0 / PI.sqrt() * r.value
}

/// Independence Metropolis chain on s targeting e^{−s} s^{−1/2} p_a(s).
#[derive(Debug, Clone)]
pub(crate) struct TiltChain {
    a: f64,
    s: f64,
    log_w: f64,
    pub(crate) accepted: u64,
    pub(crate) proposed: u64,
}

pub(crate) const TILT_BURN_IN: usize = 1000;
pub(crate) const TILT_THIN: usize = 10;

fn log_weight(s: f64) -> f64 {
    -s - 0.5 * s.ln()
}

impl TiltChain {
    pub(crate) fn new<R: Rng + ?Sized>(a: f64, rng: &mut R) -> Self {
        let s = sample_positive_stable(a, rng);
        let mut c = TiltChain { a, s, log_w: log_weight(s), accepted: 0, proposed: 0 };
        for _ in 0..TILT_BURN_IN {
            c.step(rng);
        }
        c.accepted = 0;
        c.proposed = 0;
        c
    }

    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let s = sample_positive_stable(self.a, rng);
        let lw = log_weight(s);
        self.proposed += 1;
        let u: f64 = rng.random();
        if u.ln() < lw - self.log_w {
            self.s = s;
            self.log_w = lw;
            self.accepted += 1;
        }
    }

    pub(crate) fn next<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        for _ in 0..TILT_THIN {
            self.step(rng);
        }
        self.s
    }
}
