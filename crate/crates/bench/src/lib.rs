//! Inputs shared by the criterion benches.

use pervol_core::synthetic::{torus_cloud, uniform_cloud};
use pervol_core::{build_alpha_filtration, reduce, Filtration, PersistencePair};

pub fn alpha(n: usize, dim: usize, seed: u64) -> Filtration {
    build_alpha_filtration(&uniform_cloud(n, dim, seed)).expect("random points are in general position")
}

pub fn torus(n: usize, seed: u64) -> Filtration {
    build_alpha_filtration(&torus_cloud(n, 2.0, 0.8, seed)).expect("random points are in general position")
}

/// Finite degree `q` pairs sorted by decreasing persistence, with the full pair list.
pub fn prominent(f: &Filtration, q: usize) -> (Vec<PersistencePair>, Vec<PersistencePair>) {
    let rm = reduce(f);
    let mut d: Vec<PersistencePair> = rm.diagram(f, q).into_iter().filter(|p| !p.is_essential()).collect();
    d.sort_by(|a, b| b.persistence().total_cmp(&a.persistence()));
    (d, rm.pairs(f))
}
