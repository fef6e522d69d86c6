use std::collections::{BTreeSet, HashSet};

use surflab::graph::{
    box_graph, build_lattice_box, build_tree, strong_transience_partition, transience_path, Boundary, DropMode,
    FunctionalLabel,
};
use surflab::Error;

fn min_eigenvalue(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Independent count of boundary-crossing and interior edges of [-L..L]^d.
fn enumerate_box(d: usize, l: i64) -> (usize, usize) {
    let side = (2 * l + 1) as usize;
    let n = side.pow(d as u32);
    let mut interior = 0;
    let mut crossing = 0;
    for v in 0..n {
        let mut c = vec![0i64; d];
        let mut r = v;
        for k in 0..d {
            c[k] = (r % side) as i64 - l;
            r /= side;
        }
        for k in 0..d {
            for s in [-1, 1] {
                let y = c[k] + s;
                if y.abs() > l {
                    crossing += 1;
                } else if s == 1 {
                    interior += 1;
                }
            }
        }
    }
    (interior, crossing)
}

#[test]
fn wired_path_counts() {
    let m = build_lattice_box(1, 1, Boundary::Wired, 1).unwrap();
    assert_eq!(m.dof(), 3);
    assert_eq!(m.functional_count(), 4);
    let labels: Vec<_> = m.functionals().iter().map(|f| f.label).collect();
    assert_eq!(labels.iter().filter(|&&l| l == FunctionalLabel::Edge).count(), 2);
}

#[test]
fn wired_square_counts_match_enumeration() {
    let m = build_lattice_box(2, 1, Boundary::Wired, 1).unwrap();
    assert_eq!(m.dof(), 9);
    assert_eq!(m.functional_count(), 24);
    let interior = m.functionals().iter().filter(|f| f.label == FunctionalLabel::Edge).count();
    assert_eq!(interior, 12);
    assert_eq!(24 - interior, 9 * 4 - 2 * 12);
    for (d, l) in [(1, 3), (2, 2), (3, 2), (4, 1)] {
        let m = build_lattice_box(d, l, Boundary::Wired, 1).unwrap();
        let (i, c) = enumerate_box(d, l as i64);
        assert_eq!(m.functional_count(), i + c, "d={d} L={l}");
    }
}

#[test]
fn torus_counts() {
    let m = build_lattice_box(1, 1, Boundary::Torus, 1).unwrap();
    assert_eq!(m.site_count(), 3);
    assert_eq!(m.functional_count(), 3);
    for (d, l) in [(2, 1), (2, 2), (3, 1)] {
        let m = build_lattice_box(d, l, Boundary::Torus, 1).unwrap();
        let s = 2 * l + 1;
        assert_eq!(m.functional_count(), d * s.pow(d as u32));
    }
}

#[test]
fn rejected_combinations() {
    assert!(matches!(
        build_lattice_box(2, 1, Boundary::FreePinned { v0: Some(vec![5, 0]) }, 1),
        Err(Error::InvalidParameter { .. })
    ));
    assert!(matches!(build_lattice_box(2, 2, Boundary::Torus, 2), Err(Error::Unsupported(_))));
    assert!(build_tree(2, 3).is_err());
    assert!(strong_transience_partition(2, 3).is_err());
}

#[test]
fn tree_counts() {
    let m = build_tree(3, 1).unwrap();
    assert_eq!((m.dof(), m.functional_count()), (1, 3));
    let m = build_tree(3, 2).unwrap();
    assert_eq!(m.dof(), 4);
    let edges = m.functionals().iter().filter(|f| f.label == FunctionalLabel::Edge).count();
    assert_eq!((edges, m.functional_count() - edges), (3, 6));
    // breadth-first count 1 + d + d(d-1) + ...
    let m = build_tree(4, 3).unwrap();
    assert_eq!(m.dof(), 1 + 4 + 12);
    assert!(m.network().unwrap().is_connected());
}

#[test]
fn unit_precision_is_positive_definite() {
    let models = vec![
        build_lattice_box(1, 4, Boundary::Wired, 1).unwrap(),
        build_lattice_box(2, 3, Boundary::Wired, 1).unwrap(),
        build_lattice_box(3, 2, Boundary::Wired, 1).unwrap(),
        build_lattice_box(2, 3, Boundary::FreePinned { v0: None }, 1).unwrap(),
        build_lattice_box(2, 3, Boundary::FreePinned { v0: Some(vec![3, -1]) }, 1).unwrap(),
        build_lattice_box(2, 2, Boundary::Torus, 1).unwrap(),
        build_lattice_box(2, 2, Boundary::Wired, 2).unwrap(),
        build_lattice_box(2, 2, Boundary::Wired, 3).unwrap(),
        build_lattice_box(1, 5, Boundary::Wired, 4).unwrap(),
        build_tree(3, 4).unwrap(),
    ];
    for m in &models {
        assert!(m.dof() <= 200);
        let f = m.unit_precision_dense();
        assert!((f.clone() - f.transpose()).abs().max() == 0.0);
        assert!(min_eigenvalue(&f) > 1e-9, "{:?} L={}", m.boundary(), m.radius());
    }
}

#[test]
fn wired_gradient_functionals_are_signed_pairs() {
    let m = build_lattice_box(3, 2, Boundary::Wired, 1).unwrap();
    let g = m.network().unwrap();
    assert_eq!(g.edge_count(), m.functional_count());
    let mut seen = HashSet::new();
    for (e, f) in m.functionals().iter().enumerate() {
        assert!(f.entries.len() <= 2);
        assert!(f.entries.iter().all(|&(_, c)| c == 1.0 || c == -1.0));
        if f.entries.len() == 2 {
            assert_eq!(f.entries[0].1, 1.0);
            assert!(f.entries[0].0 < f.entries[1].0);
        }
        assert!(seen.insert(f.origin));
        assert_eq!(f.origin, e);
    }
}

#[test]
fn even_order_rows_are_laplacian_powers() {
    let m = build_lattice_box(1, 2, Boundary::Wired, 2).unwrap();
    // rows of Δ over w ∈ [-3..3], columns Λ = [-2..2]
    assert_eq!(m.functional_count(), 7);
    let row = &m.functionals()[3]; // w = 0, Λ index 2
    assert_eq!(row.entries, vec![(1, -1.0), (2, 2.0), (3, -1.0)]);
    let m = build_lattice_box(1, 1, Boundary::Wired, 4).unwrap();
    // Δ² e_0 = (1, -4, 6, -4, 1)
    let centre = m.functionals().iter().find(|f| f.entries.contains(&(1, 6.0))).unwrap();
    assert_eq!(centre.entries, vec![(0, -4.0), (1, 6.0), (2, -4.0)]);
}

#[test]
fn restrict_model_cases() {
    let m = build_lattice_box(2, 2, Boundary::Wired, 1).unwrap();
    let same = m.restrict(|_| true, DropMode::Delete).unwrap();
    assert_eq!(same.functionals(), m.functionals());

    let path = build_lattice_box(1, 0, Boundary::Wired, 1).unwrap();
    assert_eq!(path.functional_count(), 2);
    let two = surflab::graph::build_lattice_box(1, 1, Boundary::Wired, 1).unwrap();
    // 3-vertex path: drop the left boundary edge
    let r = two.restrict(|e| e != 0, DropMode::Delete).unwrap();
    assert_eq!(r.functional_count(), 3);

    // dropping every interior edge: spanning iff every vertex touches the boundary
    let interior = |m: &surflab::graph::FunctionalModel, e: usize| m.functionals()[e].label == FunctionalLabel::Edge;
    let small = build_lattice_box(2, 1, Boundary::Wired, 1).unwrap();
    assert!(small.restrict(|e| !interior(&small, e), DropMode::Delete).is_err());
    let thin = build_lattice_box(1, 3, Boundary::Wired, 1).unwrap();
    assert_eq!(thin.restrict(|e| !interior(&thin, e), DropMode::Delete).err(), Some(Error::SpanLost));
    let flag = m.restrict(|e| e % 7 != 0, DropMode::InfiniteResistance).unwrap();
    assert_eq!(flag.functional_count(), m.functional_count());
    assert!(flag.is_forced_infinite(0));
}

#[test]
fn restrict_rank_matches_dense_oracle() {
    let m = build_lattice_box(2, 2, Boundary::Wired, 1).unwrap();
    for seed in 0..20u64 {
        let keep = |e: usize| (e as u64 * 2654435761 + seed * 97) % 5 != 0;
        let mut f = nalgebra::DMatrix::<f64>::zeros(m.dof(), m.dof());
        for (e, fun) in m.functionals().iter().enumerate() {
            if keep(e) {
                for &(i, a) in &fun.entries {
                    for &(k, b) in &fun.entries {
                        f[(i, k)] += a * b;
                    }
                }
            }
        }
        let full_rank = min_eigenvalue(&f) > 1e-9;
        assert_eq!(m.restrict(keep, DropMode::Delete).is_ok(), full_rank);
    }
}

#[test]
fn partition_example_path() {
    let p = transience_path(4, 3, -1);
    let expect: Vec<Vec<i64>> =
        vec![vec![0, 0, 0, 0], vec![0, 0, -1, 0], vec![0, 0, -1, -1], vec![1, 0, -1, -1], vec![1, 1, -1, -1]];
    assert_eq!(p, expect);
}

#[test]
fn partition_properties() {
    for d in 3..=5 {
        let lmax = if d == 5 { 3 } else { 6 };
        for l in 1..=lmax {
            let spec = strong_transience_partition(d, l).unwrap();
            assert_eq!(spec.parts.len(), 2 * d);
            let g = box_graph(d, l);
            let origin = g.coords().unwrap().iter().position(|c| c.iter().all(|&x| x == 0)).unwrap();
            let mut used = HashSet::new();
            let mut path_vertices: Vec<BTreeSet<Vec<i64>>> = Vec::new();
            for part in &spec.parts {
                assert!(part.endpoint.iter().all(|x| x.abs() == 1));
                for &e in &part.edges {
                    assert!(used.insert(e), "edge {e} reused (d={d}, L={l})");
                }
                let touches = part.edges.iter().any(|&e| {
                    let (a, b) = g.edge(e);
                    a == origin || b == origin
                });
                assert!(touches);
                path_vertices.push(part.path[1..].iter().cloned().collect());
                // orthant vertices satisfy w_j v_j >= 1
                for &e in &part.edges[d..] {
                    let (a, b) = g.edge(e);
                    for v in [a, b] {
                        let c = &g.coords().unwrap()[v];
                        assert!(c.iter().zip(&part.endpoint).all(|(x, w)| x * w >= 1));
                    }
                }
            }
            for i in 0..path_vertices.len() {
                for j in i + 1..path_vertices.len() {
                    assert!(path_vertices[i].is_disjoint(&path_vertices[j]));
                }
            }
        }
    }
}

#[test]
fn json_export_shape() {
    let m = build_lattice_box(1, 1, Boundary::Wired, 1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
    assert_eq!(v["dim"], 1);
    assert_eq!(v["j"], 1);
    assert_eq!(v["functionals"].as_array().unwrap().len(), 4);
    assert_eq!(v["boundary"]["kind"], "wired");
}
