//! Codimension-one persistence through the dual graph of n-cells.
//!
//! The reverse sweep merges n-cells across (n−1)-simplices. The reported forest keeps every
//! link exactly as made; root queries go through a separate path-compressed parent array.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use crate::complex::{pack, Filtration};
use crate::error::{Error, Result};
use crate::persistence::PersistencePair;

const NONE: u32 = u32::MAX;

/// A node of the dual graph: an n-simplex or the unbounded complement `σ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DualCell {
    Simplex(usize),
    Infinity,
}

/// The two n-cells on either side of each (n−1)-simplex.
#[derive(Debug, Clone)]
pub struct DualAdjacency {
    facets: Vec<u32>,
    sides: Vec<[u32; 2]>,
    top: Vec<u32>,
}

impl DualAdjacency {
    fn cell(&self, slot: u32) -> DualCell {
        if slot as usize == self.top.len() {
            DualCell::Infinity
        } else {
            DualCell::Simplex(self.top[slot as usize] as usize)
        }
    }

    /// Sides of the (n−1)-simplex with filtration index `k`, ordered with `σ∞` last.
    pub fn get(&self, k: usize) -> Option<(DualCell, DualCell)> {
        let i = self.facets.binary_search(&(k as u32)).ok()?;
        let [a, b] = self.sides[i];
        Some((self.cell(a), self.cell(b)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, DualCell, DualCell)> + '_ {
        self.facets.iter().zip(&self.sides).map(|(&k, &[a, b])| (k as usize, self.cell(a), self.cell(b)))
    }

    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }
}

fn facet_keys(v: &[u32]) -> impl Iterator<Item = u128> + '_ {
    (0..v.len()).map(move |i| {
        let mut f = [0u32; 4];
        let mut m = 0;
        for (j, &x) in v.iter().enumerate() {
            if j != i {
                f[m] = x;
                m += 1;
            }
        }
        pack(&f[..m])
    })
}

/// Builds the dual graph. Every (n−1)-simplex must have one or two n-cofaces.
pub fn dual_adjacency(f: &Filtration) -> Result<DualAdjacency> {
    let n = f.ambient_dim();
    if n == 0 {
        return Err(Error::Unsupported("ambient dimension 0 has no codimension-one classes".into()));
    }
    let top: Vec<u32> = (0..f.len()).filter(|&k| f.dim(k) == n).map(|k| k as u32).collect();
    let mut facets: Vec<(u128, u32)> =
        (0..f.len()).filter(|&k| f.dim(k) == n - 1).map(|k| (pack(f.vertices(k)), k as u32)).collect();
    let mut incid: Vec<(u128, u32)> = Vec::with_capacity(top.len() * (n + 1));
    for (slot, &k) in top.iter().enumerate() {
        incid.extend(facet_keys(f.vertices(k as usize)).map(|key| (key, slot as u32)));
    }
    facets.sort_unstable();
    incid.sort_unstable();
    let inf = top.len() as u32;
    let mut out_facets = Vec::with_capacity(facets.len());
    let mut sides = Vec::with_capacity(facets.len());
    let mut j = 0;
    for &(key, k) in &facets {
        while j < incid.len() && incid[j].0 < key {
            j += 1;
        }
        let start = j;
        while j < incid.len() && incid[j].0 == key {
            j += 1;
        }
        let pair = match &incid[start..j] {
            [(_, a)] => [*a, inf],
            [(_, a), (_, b)] => [*a, *b],
            other => {
                return Err(Error::ConditionViolation(format!(
                    "(n-1)-simplex {} has {} n-dimensional cofaces (expected 1 or 2)",
                    k + 1,
                    other.len()
                )))
            }
        };
        out_facets.push(k);
        sides.push(pair);
    }
    let mut order: Vec<usize> = (0..out_facets.len()).collect();
    order.sort_unstable_by_key(|&i| out_facets[i]);
    Ok(DualAdjacency {
        facets: order.iter().map(|&i| out_facets[i]).collect(),
        sides: order.iter().map(|&i| sides[i]).collect(),
        top,
    })
}

/// Forest of dual cells with labelled child→parent links and a root-query accelerator.
#[derive(Debug)]
pub struct PersistenceForest {
    top: Vec<u32>,
    parent: Vec<u32>,
    label: Vec<u32>,
    child_start: Vec<u32>,
    child_list: Vec<u32>,
    accel: Vec<AtomicU32>,
    probes: AtomicU64,
    finds: AtomicU64,
    unions: usize,
}

impl PersistenceForest {
    fn with_top(top: Vec<u32>) -> Self {
        let nodes = top.len() + 1;
        PersistenceForest {
            top,
            parent: vec![NONE; nodes],
            label: vec![NONE; nodes],
            child_start: Vec::new(),
            child_list: Vec::new(),
            accel: (0..nodes as u32).map(AtomicU32::new).collect(),
            probes: AtomicU64::new(0),
            finds: AtomicU64::new(0),
            unions: 0,
        }
    }

    fn infinity_slot(&self) -> u32 {
        self.top.len() as u32
    }

    fn cell(&self, slot: u32) -> DualCell {
        if slot == self.infinity_slot() {
            DualCell::Infinity
        } else {
            DualCell::Simplex(self.top[slot as usize] as usize)
        }
    }

    fn slot(&self, c: DualCell) -> Option<u32> {
        match c {
            DualCell::Infinity => Some(self.infinity_slot()),
            DualCell::Simplex(k) => self.top.binary_search(&(k as u32)).ok().map(|s| s as u32),
        }
    }

    fn find_slot(&self, x: u32) -> u32 {
        self.finds.fetch_add(1, Ordering::Relaxed);
        let mut probes = 1u64;
        let mut root = x;
        loop {
            let p = self.accel[root as usize].load(Ordering::Relaxed);
            if p == root {
                break;
            }
            root = p;
            probes += 1;
        }
        let mut cur = x;
        while cur != root {
            let next = self.accel[cur as usize].load(Ordering::Relaxed);
            self.accel[cur as usize].store(root, Ordering::Relaxed);
            cur = next;
        }
        self.probes.fetch_add(probes, Ordering::Relaxed);
        root
    }

    fn link(&mut self, child: u32, parent: u32, label: u32) {
        debug_assert_eq!(self.parent[child as usize], NONE);
        self.parent[child as usize] = parent;
        self.label[child as usize] = label;
        *self.accel[child as usize].get_mut() = parent;
        self.unions += 1;
    }

    fn build_children(&mut self) {
        let nodes = self.parent.len();
        let mut count = vec![0u32; nodes + 1];
        for &p in &self.parent {
            if p != NONE {
                count[p as usize + 1] += 1;
            }
        }
        for i in 0..nodes {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut list = vec![0u32; count[nodes] as usize];
        for (c, &p) in self.parent.iter().enumerate() {
            if p != NONE {
                list[fill[p as usize] as usize] = c as u32;
                fill[p as usize] += 1;
            }
        }
        self.child_start = count;
        self.child_list = list;
    }

    fn children_slots(&self, s: u32) -> &[u32] {
        &self.child_list[self.child_start[s as usize] as usize..self.child_start[s as usize + 1] as usize]
    }

    /// Number of nodes including `σ∞`.
    pub fn num_nodes(&self) -> usize {
        self.parent.len()
    }

    pub fn num_unions(&self) -> usize {
        self.unions
    }

    /// Total accelerator probes and root queries so far.
    pub fn probe_stats(&self) -> (u64, u64) {
        (self.probes.load(Ordering::Relaxed), self.finds.load(Ordering::Relaxed))
    }

    pub fn reset_probe_stats(&self) {
        self.probes.store(0, Ordering::Relaxed);
        self.finds.store(0, Ordering::Relaxed);
    }

    /// Parent cell and edge label (an (n−1)-simplex index).
    pub fn parent(&self, c: DualCell) -> Option<(DualCell, usize)> {
        let s = self.slot(c)?;
        let p = self.parent[s as usize];
        (p != NONE).then(|| (self.cell(p), self.label[s as usize] as usize))
    }

    /// Child cells with edge labels.
    pub fn children(&self, c: DualCell) -> Vec<(DualCell, usize)> {
        match self.slot(c) {
            Some(s) if !self.child_start.is_empty() => self
                .children_slots(s)
                .iter()
                .map(|&ch| (self.cell(ch), self.label[ch as usize] as usize))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// All cells, n-simplices in index order followed by `σ∞`.
    pub fn cells(&self) -> impl Iterator<Item = DualCell> + '_ {
        (0..self.num_nodes() as u32).map(|s| self.cell(s))
    }

    /// `(child, parent, label)` for every edge.
    pub fn edges(&self) -> impl Iterator<Item = (DualCell, DualCell, usize)> + '_ {
        (0..self.num_nodes()).filter(|&s| self.parent[s] != NONE).map(|s| {
            (self.cell(s as u32), self.cell(self.parent[s]), self.label[s] as usize)
        })
    }

    /// Root by following the reported edges only.
    pub fn naive_root(&self, c: DualCell) -> Option<DualCell> {
        let mut s = self.slot(c)?;
        while self.parent[s as usize] != NONE {
            s = self.parent[s as usize];
        }
        Some(self.cell(s))
    }
}

/// Root of the tree containing `node`, via the path-compressed accelerator.
pub fn find_root(node: DualCell, forest: &PersistenceForest) -> Option<DualCell> {
    let s = forest.slot(node)?;
    Some(forest.cell(forest.find_slot(s)))
}

/// Reverse sweep over the filtration that links the younger root under the older one.
pub fn compute_forest(f: &Filtration) -> Result<PersistenceForest> {
    sweep(f, |_| {})
}

fn sweep(f: &Filtration, mut after_union: impl FnMut(&PersistenceForest)) -> Result<PersistenceForest> {
    let adj = dual_adjacency(f)?;
    let mut forest = PersistenceForest::with_top(adj.top.clone());
    for (&k, &[a, b]) in adj.facets.iter().zip(&adj.sides).rev() {
        let ra = forest.find_slot(a);
        let rb = forest.find_slot(b);
        if ra != rb {
            forest.link(ra.min(rb), ra.max(rb), k);
            after_union(&forest);
        }
    }
    forest.build_children();
    Ok(forest)
}

/// Degree n−1 diagram: one pair `(label, child)` per edge, sorted by birth index.
pub fn diagram_from_forest(forest: &PersistenceForest, f: &Filtration) -> Vec<PersistencePair> {
    let q = f.ambient_dim() - 1;
    let mut pairs: Vec<PersistencePair> = forest
        .edges()
        .map(|(child, _, b)| {
            let DualCell::Simplex(d) = child else { unreachable!("σ∞ has no parent") };
            PersistencePair {
                degree: q,
                birth_index: b,
                death_index: Some(d),
                birth_value: f.value(b),
                death_value: Some(f.value(d)),
            }
        })
        .collect();
    pairs.sort_by_key(|p| p.birth_index);
    pairs
}

fn edge_of_pair(forest: &PersistenceForest, pair: &PersistencePair) -> Result<u32> {
    let missing = || Error::InvalidInput(format!("pair born at {} is not in the forest", pair.birth_index + 1));
    let d = pair.death_index.ok_or_else(|| Error::Unsupported("essential pairs have no volume".into()))?;
    let s = forest.slot(DualCell::Simplex(d)).ok_or_else(missing)?;
    if forest.label[s as usize] as usize != pair.birth_index {
        return Err(missing());
    }
    Ok(s)
}

/// Descendants of the death simplex (itself included), as ascending n-simplex indices.
pub fn volume_from_forest(forest: &PersistenceForest, pair: &PersistencePair) -> Result<Vec<usize>> {
    let s = edge_of_pair(forest, pair)?;
    let mut out = Vec::new();
    let mut stack = vec![s];
    while let Some(x) = stack.pop() {
        out.push(forest.top[x as usize] as usize);
        for &c in forest.children_slots(x) {
            debug_assert!(forest.label[c as usize] as usize > pair.birth_index);
            stack.push(c);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Descendants reachable only through edges labelled above the birth index.
pub fn volume_from_forest_labelled(forest: &PersistenceForest, pair: &PersistencePair) -> Result<Vec<usize>> {
    let s = edge_of_pair(forest, pair)?;
    let mut out = Vec::new();
    let mut stack = vec![s];
    while let Some(x) = stack.pop() {
        out.push(forest.top[x as usize] as usize);
        stack.extend(forest.children_slots(x).iter().filter(|&&c| forest.label[c as usize] as usize > pair.birth_index));
    }
    out.sort_unstable();
    Ok(out)
}

/// Tree over finite degree n−1 pairs.
#[derive(Debug, Clone)]
pub struct PersistenceTree {
    pub pairs: Vec<PersistencePair>,
    /// Parent position in `pairs`, or `None` for children of `σ∞`.
    pub parent: Vec<Option<usize>>,
}

impl PersistenceTree {
    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.pairs.len()).filter(|&j| self.parent[j] == Some(i)).collect()
    }

    /// Strict descendants of node `i`.
    pub fn descendants(&self, i: usize) -> Vec<usize> {
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); self.pairs.len()];
        for (j, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                kids[*p].push(j);
            }
        }
        let mut out = Vec::new();
        let mut stack = kids[i].clone();
        while let Some(j) = stack.pop() {
            out.push(j);
            stack.extend(&kids[j]);
        }
        out.sort_unstable();
        out
    }

    pub fn position_by_death(&self, d: usize) -> Option<usize> {
        self.pairs.iter().position(|p| p.death_index == Some(d))
    }
}

pub fn persistence_tree(forest: &PersistenceForest, f: &Filtration) -> PersistenceTree {
    let pairs = diagram_from_forest(forest, f);
    let by_death: HashMap<usize, usize> =
        pairs.iter().enumerate().filter_map(|(i, p)| p.death_index.map(|d| (d, i))).collect();
    let parent = pairs
        .iter()
        .map(|p| {
            let d = p.death_index.expect("finite");
            match forest.parent(DualCell::Simplex(d)) {
                Some((DualCell::Simplex(up), _)) => by_death.get(&up).copied(),
                _ => None,
            }
        })
        .collect();
    PersistenceTree { pairs, parent }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::persistence::reduce;

    #[test]
    fn square_with_diagonal_adjacency() {
        let f = fixtures::square_with_diagonal();
        let adj = dual_adjacency(&f).unwrap();
        let diag = f.index_of(&[0, 2]).unwrap();
        let t1 = f.index_of(&[0, 1, 2]).unwrap();
        let t2 = f.index_of(&[0, 2, 3]).unwrap();
        assert_eq!(adj.get(diag), Some((DualCell::Simplex(t1), DualCell::Simplex(t2))));
        for e in [[0, 1], [1, 2], [2, 3], [0, 3]] {
            let (a, b) = adj.get(f.index_of(&e).unwrap()).unwrap();
            assert_eq!(b, DualCell::Infinity);
            assert!(matches!(a, DualCell::Simplex(_)));
        }
    }

    #[test]
    fn single_triangle_forest() {
        let f = fixtures::filled_triangle();
        let forest = compute_forest(&f).unwrap();
        assert_eq!(forest.num_nodes(), 2);
        assert_eq!(forest.parent(DualCell::Simplex(6)), Some((DualCell::Infinity, 5)));
        let pairs: Vec<_> = diagram_from_forest(&forest, &f).iter().map(|p| p.indices()).collect();
        assert_eq!(pairs, vec![(5, Some(6))]);
        let tree = persistence_tree(&forest, &f);
        assert_eq!(tree.parent, vec![None]);
        assert_eq!(volume_from_forest(&forest, &tree.pairs[0]).unwrap(), vec![6]);
    }

    #[test]
    fn square_with_diagonal_matches_reduction() {
        let f = fixtures::square_with_diagonal();
        let forest = compute_forest(&f).unwrap();
        let a = diagram_from_forest(&forest, &f);
        let b = reduce(&f).diagram(&f, 1);
        assert_eq!(a, b);
        assert_eq!(forest.num_unions(), 2);
        assert_eq!(a.iter().filter(|p| !p.is_zero_persistence()).count(), 1);
    }

    #[test]
    fn missing_coface_is_a_condition_violation() {
        let f = fixtures::hollow_square();
        assert!(matches!(compute_forest(&f), Err(Error::ConditionViolation(_))));
    }

    #[test]
    fn essential_pair_has_no_forest_volume() {
        let f = fixtures::filled_triangle();
        let forest = compute_forest(&f).unwrap();
        let p = PersistencePair { degree: 1, birth_index: 5, death_index: None, birth_value: 0.0, death_value: None };
        assert!(volume_from_forest(&forest, &p).is_err());
    }

    #[test]
    fn accelerator_agrees_with_naive_roots_after_every_union() {
        for seed in 0..10 {
            let pc = crate::synthetic::uniform_cloud(25, 2 + (seed as usize % 2), seed);
            let f = crate::alpha::build_alpha_filtration(&pc).unwrap();
            let mut checked = 0;
            let forest = sweep(&f, |forest| {
                for s in 0..forest.num_nodes() as u32 {
                    let mut naive = s;
                    while forest.parent[naive as usize] != NONE {
                        naive = forest.parent[naive as usize];
                    }
                    assert_eq!(forest.find_slot(s), naive);
                }
                checked += 1;
            })
            .unwrap();
            assert_eq!(checked, forest.num_unions());
            assert_eq!(forest.num_unions(), forest.num_nodes() - 1);
        }
    }

    #[test]
    fn path_compression_flattens_long_chains() {
        let n = 100_000u32;
        let mut forest = PersistenceForest::with_top((0..n).collect());
        for s in 0..n {
            forest.link(s, s + 1, s);
        }
        let root = forest.infinity_slot();
        assert_eq!(forest.find_slot(0), root);
        let (first, _) = forest.probe_stats();
        assert_eq!(first, n as u64 + 1);
        forest.reset_probe_stats();
        for s in 0..n {
            assert_eq!(forest.find_slot(s), root);
        }
        let (probes, finds) = forest.probe_stats();
        assert!(probes <= 2 * finds, "{probes} probes for {finds} finds");
        assert_eq!(forest.naive_root(DualCell::Simplex(0)), Some(DualCell::Infinity));
    }

    #[test]
    fn root_of_root_is_itself() {
        let f = fixtures::square_with_diagonal();
        let forest = compute_forest(&f).unwrap();
        assert_eq!(find_root(DualCell::Infinity, &forest), Some(DualCell::Infinity));
    }
}
