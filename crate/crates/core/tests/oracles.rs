mod common;

use std::collections::BTreeSet;

use pervol_core::alpha::delaunay;
use pervol_core::lp::{minimize_l1, solve, Bound, L1Column, L1Problem, LinearProgram, LpStatus};
use pervol_core::merge_tree::{diagram_from_forest, dual_adjacency, volume_from_forest};
use pervol_core::synthetic::uniform_cloud;
use pervol_core::volume::{optimal_volume, VolumeOptions};
use pervol_core::{compute_forest, persistence_tree, reduce, DualCell};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn delaunay_matches_empty_sphere_enumeration() {
    for seed in 0..15 {
        for (dim, n) in [(2, 8 + seed as usize), (3, 7 + seed as usize / 2)] {
            let pc = uniform_cloud(n, dim, seed);
            let got: BTreeSet<Vec<u32>> = delaunay(&pc).unwrap().top.into_iter().collect();
            assert_eq!(got, common::brute_delaunay(&pc), "dim {dim}, seed {seed}");
        }
    }
}

#[test]
fn tetrahedron_facets_have_at_most_two_cofaces() {
    for f in common::random_alpha(3, 5, 8..=20, 3) {
        for k in f.indices_of_dim(2).collect::<Vec<_>>() {
            let c = f.cofaces(k, 3);
            assert_eq!(c, common::brute_cofaces(&f, k, 3));
            assert!(c.len() <= 2);
        }
        for k in f.indices_of_dim(0).collect::<Vec<_>>() {
            assert_eq!(f.cofaces(k, 2), common::brute_cofaces(&f, k, 2));
        }
    }
}

#[test]
fn dual_adjacency_matches_brute_force_cofaces() {
    for f in common::random_alpha(3, 4, 8..=20, 5).into_iter().chain(common::random_alpha(2, 4, 10..=30, 6)) {
        let n = f.max_dim().unwrap();
        let adj = dual_adjacency(&f).unwrap();
        let facets: Vec<usize> = f.indices_of_dim(n - 1).collect();
        assert_eq!(adj.len(), facets.len());
        for k in facets {
            let brute = common::brute_cofaces(&f, k, n);
            let (a, b) = adj.get(k).unwrap();
            let mut got: Vec<DualCell> = vec![a, b];
            got.sort();
            let mut want: Vec<DualCell> = brute.into_iter().map(DualCell::Simplex).collect();
            if want.len() == 1 {
                want.push(DualCell::Infinity);
            }
            want.sort();
            assert_eq!(got, want);
        }
    }
}

fn random_lp(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let n = rng.gen_range(2..=6);
    let m = rng.gen_range(1..=4.min(n));
    let mut a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-3..=3) as f64).collect()).collect();
    a[0] = vec![1.0; n];
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect();
    let b = if rng.gen_bool(0.8) {
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=3) as f64).collect();
        a.iter().map(|row| row.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect()
    } else {
        (0..m).map(|_| rng.gen_range(-4..=4) as f64).collect()
    };
    (c, a, b)
}

#[test]
fn lp_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..300 {
        let (c, a, b) = random_lp(&mut rng);
        let lp = LinearProgram::dense(c.clone(), &a, b.clone(), vec![Bound::NonNegative; c.len()]);
        let sol = solve(&lp).unwrap();
        match common::vertex_enumeration(&c, &a, &b) {
            Some(opt) => {
                assert_eq!(sol.status, LpStatus::Optimal, "{c:?} {a:?} {b:?}");
                assert!((sol.objective - opt).abs() <= 1e-9, "{} vs {opt}", sol.objective);
                assert!(lp.residual(&sol.x) <= 1e-9);
                assert!(sol.x.iter().all(|&x| x >= -1e-9));
            }
            None => assert_eq!(sol.status, LpStatus::Infeasible, "{c:?} {a:?} {b:?}"),
        }
    }
}

#[test]
fn lp_optimum_never_exceeds_a_known_feasible_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let n = rng.gen_range(2..=8);
        let m = rng.gen_range(1..=n);
        let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = a.iter().map(|row| row.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect();
        let p = L1Problem {
            rows: a.iter().map(|row| row.iter().copied().enumerate().collect()).collect(),
            rhs: b,
            columns: vec![L1Column::Penalized; n],
            constant: 0.0,
        };
        let sol = minimize_l1(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        let hand: f64 = x0.iter().map(|x| x.abs()).sum();
        assert!(sol.objective <= hand + 1e-9);
        let l1: f64 = sol.x.iter().map(|x| x.abs()).sum();
        assert!((l1 - sol.objective).abs() < 1e-9);
    }
}

#[test]
fn codim_one_volumes_match_exhaustive_search() {
    let mut checked = 0;
    for f in common::random_alpha(2, 12, 6..=12, 11) {
        let rm = reduce(&f);
        let all = rm.pairs(&f);
        for pair in rm.diagram(&f, 1).into_iter().filter(|p| !p.is_essential()) {
            let Some(brute) = common::min_z2_volume(&f, &pair, 18) else { continue };
            let ov = optimal_volume(&f, &pair, &all, &VolumeOptions::default()).unwrap();
            assert_eq!(ov.volume.support(), brute);
            checked += 1;
        }
    }
    assert!(checked > 20, "only {checked} pairs were small enough");
}

#[test]
fn merge_tree_diagram_matches_reduction() {
    for f in common::random_alpha(2, 10, 10..=60, 1).into_iter().chain(common::random_alpha(3, 5, 8..=30, 2)) {
        let n = f.max_dim().unwrap();
        let forest = compute_forest(&f).unwrap();
        assert_eq!(diagram_from_forest(&forest, &f), reduce(&f).diagram(&f, n - 1));
    }
}

#[test]
fn codim_one_children_are_tree_descendants() {
    for f in common::random_alpha(2, 6, 10..=30, 4).into_iter().chain(common::random_alpha(3, 3, 8..=16, 8)) {
        let rm = reduce(&f);
        let all = rm.pairs(&f);
        let forest = compute_forest(&f).unwrap();
        let tree = persistence_tree(&forest, &f);
        for (i, pair) in tree.pairs.iter().enumerate() {
            let ov = optimal_volume(&f, pair, &all, &VolumeOptions::default()).unwrap();
            let children: BTreeSet<_> = ov.children.iter().map(|p| p.indices()).collect();
            let desc: BTreeSet<_> = tree.descendants(i).into_iter().map(|j| tree.pairs[j].indices()).collect();
            assert_eq!(children, desc);
            assert_eq!(ov.volume.support(), volume_from_forest(&forest, pair).unwrap());
        }
    }
}
