mod common;

use std::collections::BTreeSet;

use pervol_core::alpha::alpha_value;
use pervol_core::complex::{canonical_sort, validate_filtration, Chain, Simplex, Z2};
use pervol_core::geometry::PointCloud;
use pervol_core::merge_tree::{diagram_from_forest, volume_from_forest, volume_from_forest_labelled};
use pervol_core::persistence::essential_euler;
use pervol_core::synthetic::{circle_cloud, uniform_cloud};
use pervol_core::volume::{check_persistent_volume, optimal_volume, z2_image, VolumeOptions};
use pervol_core::{build_alpha_filtration, compute_forest, persistence_tree, reduce, DualCell, Filtration};
use proptest::prelude::*;

fn alpha(n: usize, dim: usize, seed: u64) -> Filtration {
    build_alpha_filtration(&uniform_cloud(n, dim, seed)).unwrap()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn boundary_of_boundary_vanishes(seed in any::<u64>(), dim in 2usize..=3) {
        let f = alpha(14, dim, seed);
        for k in 0..f.len() {
            let real: Chain<f64> = f.boundary_chain(k);
            prop_assert!(real.boundary(&f).is_empty());
            let z2: Chain<Z2> = f.boundary_chain(k);
            prop_assert!(z2.boundary(&f).is_empty());
            prop_assert_eq!(real.to_z2(), z2);
        }
    }

    #[test]
    fn canonical_sort_is_idempotent_and_order_free(seed in any::<u64>(), shuffle in any::<u64>()) {
        let f = alpha(12, 2, seed);
        let again = canonical_sort(2, f.to_list(), f.points().cloned()).unwrap();
        prop_assert_eq!(again.to_list(), f.to_list());
        let mut raw = f.to_list();
        let mut state = shuffle | 1;
        for i in (1..raw.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            raw.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let shuffled = canonical_sort(2, raw, None).unwrap();
        prop_assert_eq!(shuffled.to_list(), f.to_list());
    }

    #[test]
    fn alpha_filtrations_are_valid_and_monotone(seed in any::<u64>(), dim in 2usize..=3, n in 5usize..=25) {
        let pc = uniform_cloud(n, dim, seed);
        let f = build_alpha_filtration(&pc).unwrap();
        prop_assert!(validate_filtration(&f).ok);
        for k in 0..f.len() {
            for (face, _) in f.facet_indices(k) {
                prop_assert!(f.value(face) <= f.value(k));
            }
        }
        for k in 0..f.len() {
            let direct = alpha_value(&f.simplex(k), &pc).unwrap();
            prop_assert!((direct - f.value(k)).abs() <= 1e-9);
        }
    }

    #[test]
    fn zero_weights_change_nothing(seed in any::<u64>(), dim in 2usize..=3) {
        let pc = uniform_cloud(15, dim, seed);
        let pts: Vec<Vec<f64>> = pc.points().map(<[f64]>::to_vec).collect();
        let weighted = PointCloud::new(dim, pts, Some(vec![0.0; 15])).unwrap();
        let a = build_alpha_filtration(&pc).unwrap();
        let b = build_alpha_filtration(&weighted).unwrap();
        prop_assert_eq!(a.to_list(), b.to_list());
    }

    #[test]
    fn euler_characteristic_matches_essential_classes(seed in any::<u64>(), dim in 2usize..=3) {
        let f = alpha(16, dim, seed);
        let rm = reduce(&f);
        prop_assert_eq!(f.euler_characteristic(), essential_euler(&rm.pairs(&f)));
        prop_assert!(rm.verify_decomposition(&f));
    }

    #[test]
    fn death_simplices_have_the_next_dimension(seed in any::<u64>(), dim in 2usize..=3) {
        let f = alpha(16, dim, seed);
        for p in reduce(&f).pairs(&f) {
            prop_assert_eq!(f.dim(p.birth_index), p.degree);
            if let Some(d) = p.death_index {
                prop_assert_eq!(f.dim(d), p.degree + 1);
            }
        }
    }

    #[test]
    fn persistence_cycles_satisfy_the_cycle_conditions(seed in any::<u64>(), dim in 2usize..=3) {
        let f = alpha(14, dim, seed);
        let rm = reduce(&f);
        for p in rm.pairs(&f) {
            let z = rm.persistence_cycle(&p);
            prop_assert!(rm.check_cycle_conditions(&f, &p, &z));
        }
    }

    #[test]
    fn diagram_values_survive_tie_permutations(seed in any::<u64>()) {
        let f = alpha(14, 2, seed);
        let mut raw = f.to_list();
        raw.reverse();
        let g = canonical_sort(2, raw, None).unwrap();
        let values = |f: &Filtration| {
            let mut v: Vec<(u64, Option<u64>, usize)> = reduce(f)
                .pairs(f)
                .iter()
                .filter(|p| !p.is_zero_persistence())
                .map(|p| (p.birth_value.to_bits(), p.death_value.map(f64::to_bits), p.degree))
                .collect();
            v.sort();
            v
        };
        prop_assert_eq!(values(&f), values(&g));
    }
}

fn tied_filtration(seed: u64) -> (Filtration, Filtration) {
    let pc = uniform_cloud(10, 2, seed);
    let f = build_alpha_filtration(&pc).unwrap();
    let rounded: Vec<(Simplex, f64)> = f.to_list().into_iter().map(|(s, v)| (s, (v * 4.0).ceil() / 4.0)).collect();
    let a = canonical_sort(2, rounded.clone(), None).unwrap();
    let mut rev = rounded;
    rev.reverse();
    (a, canonical_sort(2, rev, None).unwrap())
}

#[test]
fn heavily_tied_values_give_the_same_diagram() {
    for seed in 0..20 {
        let (a, b) = tied_filtration(seed);
        let d = |f: &Filtration| {
            let mut v: Vec<_> = reduce(f)
                .pairs(f)
                .iter()
                .filter(|p| !p.is_zero_persistence())
                .map(|p| (p.degree, p.birth_value.to_bits(), p.death_value.map(f64::to_bits)))
                .collect();
            v.sort();
            v
        };
        assert_eq!(d(&a), d(&b));
    }
}

#[test]
fn circle_has_one_prominent_loop() {
    for seed in 0..5 {
        let f = build_alpha_filtration(&circle_cloud(100, 1.0, 0.05, seed)).unwrap();
        let d1: Vec<f64> = reduce(&f).diagram(&f, 1).iter().map(|p| p.persistence()).collect();
        assert_eq!(d1.iter().filter(|&&p| p > 0.5).count(), 1, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn volumes_exist_and_are_persistent(seed in any::<u64>(), dim in 2usize..=3) {
        let f = alpha(if dim == 2 { 20 } else { 12 }, dim, seed);
        let rm = reduce(&f);
        let all = rm.pairs(&f);
        for p in all.iter().filter(|p| !p.is_essential() && p.degree >= 1) {
            let ov = optimal_volume(&f, p, &all, &VolumeOptions::default()).unwrap();
            prop_assert!(check_persistent_volume(&f, &rm, p, &ov.volume));
            prop_assert!(rm.check_cycle_conditions(&f, p, &z2_image(&ov.cycle)));
            for c in &ov.children {
                prop_assert!(ov.volume.contains(c.death_index.unwrap()));
            }
        }
    }

    #[test]
    fn larger_radius_never_costs_more(seed in any::<u64>()) {
        let f = alpha(18, 2, seed);
        let rm = reduce(&f);
        let all = rm.pairs(&f);
        for p in rm.diagram(&f, 1).iter().filter(|p| !p.is_essential()) {
            let mut last = f64::INFINITY;
            for r in [0.2, 0.4, 0.8, 1.6, 3.2] {
                let opts = VolumeOptions { radius: Some(r), ..VolumeOptions::default() };
                let ov = optimal_volume(&f, p, &all, &opts).unwrap();
                if ov.radius_used == Some(r) {
                    prop_assert!(ov.diagnostics.objective <= last + 1e-9);
                    last = ov.diagnostics.objective;
                }
            }
        }
    }

    #[test]
    fn forest_structure(seed in any::<u64>(), dim in 2usize..=3) {
        let f = alpha(if dim == 2 { 40 } else { 20 }, dim, seed);
        let n = f.max_dim().unwrap();
        let forest = compute_forest(&f).unwrap();
        let pairs = diagram_from_forest(&forest, &f);
        prop_assert_eq!(forest.num_nodes(), f.indices_of_dim(n).count() + 1);
        prop_assert_eq!(forest.num_unions(), pairs.len());
        prop_assert_eq!(pairs.len(), reduce(&f).diagram(&f, n - 1).iter().filter(|p| !p.is_essential()).count());

        for (child, _, _) in forest.edges() {
            let mut cur = child;
            let mut below: Option<(usize, usize)> = None;
            while let Some((up, label)) = forest.parent(cur) {
                let DualCell::Simplex(s) = cur else { unreachable!("σ∞ is always a root") };
                prop_assert!(label < s);
                if let Some((k, s_below)) = below {
                    prop_assert!(label < k && s_below < s);
                }
                below = Some((label, s));
                cur = up;
            }
        }

        let tree = persistence_tree(&forest, &f);
        let vols: Vec<BTreeSet<usize>> =
            tree.pairs.iter().map(|p| volume_from_forest(&forest, p).unwrap().into_iter().collect()).collect();
        for p in &tree.pairs {
            prop_assert_eq!(volume_from_forest(&forest, p).unwrap(), volume_from_forest_labelled(&forest, p).unwrap());
        }
        for i in 0..vols.len() {
            for j in i + 1..vols.len() {
                let (a, b) = (&vols[i], &vols[j]);
                prop_assert!(a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b));
            }
        }
    }
}
