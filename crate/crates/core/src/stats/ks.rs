/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let f = cdf(v);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Two-sample KS distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic p-value of a one-sample KS distance.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let en = (n as f64).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Empirical CDF of a 1-D density known up to normalization, on [lo, hi], by quadrature.
pub fn cdf_from_density(density: impl Fn(f64) -> f64, lo: f64, hi: f64, nodes: usize) -> impl Fn(f64) -> f64 {
    let h = (hi - lo) / nodes as f64;
    let mut acc = vec![0.0];
    for i in 0..nodes {
        let a = lo + i as f64 * h;
        let r = crate::special::integrate(&density, a, a + h, 0.0, 1e-12);
        let last = *acc.last().unwrap();
        acc.push(last + r.value);
    }
    let total = *acc.last().unwrap();
    move |x: f64| {
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let t = (x - lo) / h;
        let i = (t.floor() as usize).min(nodes - 1);
        let a = lo + i as f64 * h;
        let part = crate::special::integrate(&density, a, x, 0.0, 1e-12).value;
        (acc[i] + part) / total
    }
}
