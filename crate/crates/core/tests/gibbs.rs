use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use surflab::field::{assemble_precision, ResistanceAssignment};
use surflab::gibbs::{run_replicas, sample_metropolis, sample_mixture_exact, sample_splice, PotentialField, SamplerConfig};
use surflab::graph::{build_lattice_box, build_wired, Boundary, FunctionalModel, Graph};
use surflab::potential::{MixtureMeasure, MixturePotential, Potential, Quadratic, Splice};
use surflab::stats::{cdf_from_density, ks_distance};

fn single_vertex() -> FunctionalModel {
    let g = Graph::new(2, vec![(0, 1)]).unwrap();
    build_wired(&g, &[false, true]).unwrap()
}

fn two_path() -> FunctionalModel {
    let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
    build_wired(&g, &[true, false, false, true]).unwrap()
}

fn cfg(sweeps: usize, thin: usize, seed: u64) -> SamplerConfig {
    SamplerConfig { sweeps, burn_in: 1000, thin, seed, ..Default::default() }
}

fn std_normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

#[test]
fn degenerate_mixture_gives_standard_normal() {
    let rho = MixtureMeasure::two_point(1.0, 1.0, 0.5).unwrap();
    let c = sample_mixture_exact(&single_vertex(), &rho, &cfg(100_000, 1, 1)).unwrap();
    let d = ks_distance(&c.probe_series(), std_normal_cdf);
    assert!(d < 0.01, "ks {d}");
}

#[test]
fn pareto_mixture_marginal_matches_quadrature() {
    let rho = MixtureMeasure::rho_alpha_eps(3.0, 1.0).unwrap();
    let c = sample_mixture_exact(&single_vertex(), &rho, &cfg(100_000, 1, 2)).unwrap();
    let r = rho.clone();
    let cdf = cdf_from_density(move |x| (-r.v_exact(x)).exp(), -2000.0, 2000.0, 40_000);
    let d = ks_distance(&c.probe_series(), cdf);
    assert!(d < 0.01, "ks {d}");
}

#[test]
fn two_path_xi_law_matches_enumeration() {
    let m = two_path();
    let (k1, k2) = (1.0, 2.0);
    let rho = MixtureMeasure::two_point(k1, k2, 0.5).unwrap();
    let mut c = cfg(100_000, 1, 3);
    c.record_states = true;
    let chain = sample_mixture_exact(&m, &rho, &c).unwrap();
    let mut counts = [0f64; 8];
    for (_, xi) in chain.states.as_ref().unwrap() {
        let code: usize = xi.iter().enumerate().map(|(e, &x)| usize::from(x == k2) << e).sum();
        counts[code] += 1.0;
    }
    let n = chain.len() as f64;

    let mut w = [0f64; 8];
    for (code, wc) in w.iter_mut().enumerate() {
        let xi: Vec<f64> = (0..3).map(|e| if code >> e & 1 == 1 { k2 } else { k1 }).collect();
        let f = assemble_precision(&m, &ResistanceAssignment::new(xi.clone()).unwrap()).unwrap().matrix().to_dense();
        *wc = f.determinant().powf(-0.5) / xi.iter().product::<f64>();
    }
    let z: f64 = w.iter().sum();
    let tv: f64 = 0.5 * w.iter().zip(&counts).map(|(p, c)| (p / z - c / n).abs()).sum::<f64>();
    assert!(tv < 0.02, "tv {tv}");
}

#[test]
fn splice_with_zero_correction_always_accepts() {
    let rho = MixtureMeasure::rho_alpha_eps(3.0, 1.0).unwrap();
    let u = PotentialField::uniform(Arc::new(MixturePotential::new(rho.clone())));
    let c = sample_splice(&two_path(), &u, &rho, &cfg(2000, 1, 4)).unwrap();
    assert_eq!(c.report.acceptance_phi, 1.0);
}

#[test]
fn splice_gaussian_target() {
    let rho = MixtureMeasure::rho_alpha_eps(3.0, 0.25).unwrap();
    let u = PotentialField::uniform(Arc::new(Quadratic { stiffness: 1.0 }));
    let c = sample_splice(&single_vertex(), &u, &rho, &cfg(100_000, 1, 5)).unwrap();
    let d = ks_distance(&c.probe_series(), std_normal_cdf);
    assert!(d < 0.01, "ks {d}, acceptance {}", c.report.acceptance_phi);
}

#[test]
fn splice_log_potential_matches_quadrature() {
    let rho = MixtureMeasure::rho_alpha_eps(3.0, 1.0).unwrap();
    let s = Splice::new(3.0, 1.0).unwrap();
    let u = PotentialField::uniform(Arc::new(s));
    let c = sample_splice(&single_vertex(), &u, &rho, &cfg(100_000, 1, 6)).unwrap();
    let cdf = cdf_from_density(move |x| (-s.value(x)).exp(), -2000.0, 2000.0, 40_000);
    let d = ks_distance(&c.probe_series(), cdf);
    assert!(d < 0.01, "ks {d}");
}

#[test]
fn metropolis_gaussian_two_path_covariance() {
    let u = PotentialField::uniform(Arc::new(Quadratic { stiffness: 1.0 }));
    let mut c = cfg(200_000, 2, 7);
    c.record_states = true;
    let chain = sample_metropolis(&two_path(), &u, 1.5, &c).unwrap();
    let st = chain.states.as_ref().unwrap();
    let n = st.len() as f64;
    let mut cov = [[0.0; 2]; 2];
    for (phi, _) in st {
        for i in 0..2 {
            for j in 0..2 {
                cov[i][j] += phi[i] * phi[j] / n;
            }
        }
    }
    let exact = [[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((cov[i][j] - exact[i][j]).abs() < 0.02, "{cov:?}");
        }
    }
}

#[test]
fn metropolis_agrees_with_augmentation_on_small_box() {
    let m = build_lattice_box(2, 1, Boundary::Wired, 1).unwrap();
    let rho = MixtureMeasure::shifted_pareto(6.0, 1.0).unwrap();
    let u = PotentialField::uniform(Arc::new(MixturePotential::new(rho.clone())));
    let a = sample_mixture_exact(&m, &rho, &cfg(100_000, 1, 8)).unwrap();
    let b = sample_metropolis(&m, &u, 1.5, &cfg(200_000, 1, 9)).unwrap();
    for s in 0..m.site_count() {
        let (va, vb) = (a.site_variance(s), b.site_variance(s));
        assert!((va - vb).abs() / va < 0.05, "site {s}: {va} vs {vb}");
    }
}

#[test]
fn metropolis_small_step_accepts() {
    let u = PotentialField::uniform(Arc::new(Splice::new(3.0, 1.0).unwrap()));
    let c = sample_metropolis(&two_path(), &u, 1e-6, &cfg(1000, 1, 10)).unwrap();
    assert!(c.report.acceptance_phi > 0.999);
}

#[test]
fn splice_chain_is_reversible() {
    let rho = MixtureMeasure::rho_alpha_eps(3.0, 1.0).unwrap();
    let u = PotentialField::uniform(Arc::new(Splice::new(3.0, 1.0).unwrap()));
    let c = sample_splice(&single_vertex(), &u, &rho, &cfg(100_000, 1, 11)).unwrap();
    let xs = c.probe_series();
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    let edges: Vec<f64> = (1..20).map(|k| sorted[k * sorted.len() / 20]).collect();
    let bin = |x: f64| edges.partition_point(|&e| e <= x);
    let mut n = [[0f64; 20]; 20];
    for w in xs.windows(2) {
        n[bin(w[0])][bin(w[1])] += 1.0;
    }
    let (mut stat, mut df) = (0.0, 0usize);
    for i in 0..20 {
        for j in i + 1..20 {
            let s = n[i][j] + n[j][i];
            if s > 0.0 {
                stat += (n[i][j] - n[j][i]).powi(2) / s;
                df += 1;
            }
        }
    }
    let p = 1.0 - ChiSquared::new(df as f64).unwrap().cdf(stat);
    assert!(p > 1e-3, "bowker p = {p}");
}

fn batch_se(ind: &[f64]) -> f64 {
    let b = 50;
    let per = ind.len() / b;
    let means: Vec<f64> = (0..b).map(|k| ind[k * per..(k + 1) * per].iter().sum::<f64>() / per as f64).collect();
    let m = means.iter().sum::<f64>() / b as f64;
    (means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (b - 1) as f64 / b as f64).sqrt()
}

#[test]
fn confinement_ordering() {
    let m = build_lattice_box(2, 1, Boundary::Wired, 1).unwrap();
    let rho = MixtureMeasure::rho_alpha_eps(3.0, 1.0).unwrap();
    let u = PotentialField::uniform(Arc::new(Splice::new(3.0, 1.0).unwrap()));
    let spl = sample_splice(&m, &u, &rho, &cfg(40_000, 1, 12)).unwrap().probe_series();
    let mix = sample_mixture_exact(&m, &rho, &cfg(40_000, 1, 13)).unwrap().probe_series();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let origin = m.origin_site();
    let iid: Vec<f64> = (0..40_000)
        .map(|_| {
            let xi = ResistanceAssignment::new(rho.sample_many(m.functional_count(), &mut rng)).unwrap();
            let p = assemble_precision(&m, &xi).unwrap();
            m.to_sites(&p.sample(&mut rng).unwrap())[origin]
        })
        .collect();
    for t in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let ind = |xs: &[f64]| xs.iter().map(|x| f64::from(u8::from(x.abs() <= t))).collect::<Vec<_>>();
        let (a, b, c) = (ind(&spl), ind(&mix), ind(&iid));
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (pa, pb, pc) = (mean(&a), mean(&b), mean(&c));
        let (sa, sb, sc) = (batch_se(&a), batch_se(&b), batch_se(&c));
        assert!(pa >= pb - 3.0 * (sa * sa + sb * sb).sqrt(), "t={t}: splice {pa} < mixture {pb}");
        assert!(pb >= pc - 3.0 * (sb * sb + sc * sc).sqrt(), "t={t}: mixture {pb} < iid {pc}");
    }
}

#[test]
fn odd_moments_vanish() {
    let m = two_path();
    let rho = MixtureMeasure::two_point(1.0, 2.0, 0.5).unwrap();
    let c = sample_mixture_exact(&m, &rho, &cfg(50_000, 1, 15)).unwrap();
    let xs = c.probe_series();
    let n = xs.len() as f64;
    for k in [1, 3] {
        let v: Vec<f64> = xs.iter().map(|x| x.powi(k)).collect();
        let mean = v.iter().sum::<f64>() / n;
        let se = batch_se(&v);
        assert!(mean.abs() < 4.0 * se, "moment {k}: {mean} ± {se}");
    }
}

#[test]
fn seeds_reproduce_chains() {
    let m = build_lattice_box(2, 2, Boundary::Wired, 1).unwrap();
    let rho = MixtureMeasure::rho_alpha_eps(3.0, 1.0).unwrap();
    let u = PotentialField::uniform(Arc::new(Splice::new(3.0, 1.0).unwrap()));
    let c = SamplerConfig { sweeps: 200, burn_in: 20, thin: 5, seed: 99, ..Default::default() };
    let a = sample_splice(&m, &u, &rho, &c).unwrap();
    let b = sample_splice(&m, &u, &rho, &c).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.to_csv(), b.to_csv());
    let d = sample_splice(&m, &u, &rho, &SamplerConfig { seed: 100, ..c.clone() }).unwrap();
    assert_ne!(a.records, d.records);

    let r1 = run_replicas(5, 4, 1, |s| sample_mixture_exact(&m, &rho, &SamplerConfig { seed: s, ..c.clone() }).unwrap().to_csv());
    let r3 = run_replicas(5, 4, 3, |s| sample_mixture_exact(&m, &rho, &SamplerConfig { seed: s, ..c.clone() }).unwrap().to_csv());
    assert_eq!(r1, r3);
}

#[test]
fn rejects_bad_configs() {
    let rho = MixtureMeasure::rho_tilted_stable(1.0, 2.0).unwrap();
    assert!(sample_mixture_exact(&single_vertex(), &rho, &cfg(10, 1, 0)).is_err());
    let rho = MixtureMeasure::rho_alpha_eps(3.0, 1.0).unwrap();
    assert!(sample_mixture_exact(&single_vertex(), &rho, &cfg(10, 0, 0)).is_err());
    let mut c = cfg(10, 1, 0);
    c.probe = Some(5);
    assert!(sample_mixture_exact(&single_vertex(), &rho, &c).is_err());
    let u = PotentialField::per_functional(vec![]);
    assert!(sample_metropolis(&single_vertex(), &u, 1.0, &cfg(10, 1, 0)).is_err());
}
