//! JSON documents produced by the command line and the HTTP service.
//!
//! All filtration indices here are 1-based; vertex ids are 0-based.

use serde::{Deserialize, Serialize};

use crate::complex::{Chain, Filtration};
use crate::merge_tree::{volume_from_forest, PersistenceForest, PersistenceTree};
use crate::persistence::PersistencePair;
use crate::volume::{OptimalVolume, VolumeDiagnostics};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairJson {
    pub birth_index: usize,
    pub death_index: Option<usize>,
    pub birth_value: f64,
    pub death_value: Option<f64>,
    pub essential: bool,
}

impl From<&PersistencePair> for PairJson {
    fn from(p: &PersistencePair) -> Self {
        PairJson {
            birth_index: p.birth_index + 1,
            death_index: p.death_index.map(|d| d + 1),
            birth_value: p.birth_value,
            death_value: p.death_value,
            essential: p.is_essential(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub degree: usize,
    pub pairs: Vec<PairJson>,
}

impl DiagramJson {
    pub fn new(degree: usize, pairs: &[PersistencePair]) -> Self {
        DiagramJson { degree, pairs: pairs.iter().map(PairJson::from).collect() }
    }
}

/// One term of a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub simplex: Vec<u32>,
    pub index: usize,
    pub coefficient: f64,
}

pub fn chain_terms(f: &Filtration, c: &Chain<f64>) -> Vec<TermJson> {
    c.iter().map(|(k, v)| TermJson { simplex: f.vertices(k).to_vec(), index: k + 1, coefficient: v }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeJson {
    pub degree: usize,
    pub pair: PairJson,
    pub volume: Vec<TermJson>,
    pub cycle: Vec<TermJson>,
    pub children: Vec<PairJson>,
    pub radius_used: Option<f64>,
    pub retried_with_epsilon: bool,
    pub diagnostics: VolumeDiagnostics,
}

impl VolumeJson {
    pub fn new(f: &Filtration, ov: &OptimalVolume) -> Self {
        VolumeJson {
            degree: ov.pair.degree,
            pair: PairJson::from(&ov.pair),
            volume: chain_terms(f, &ov.volume),
            cycle: chain_terms(f, &ov.cycle),
            children: ov.children.iter().map(PairJson::from).collect(),
            radius_used: ov.radius_used,
            retried_with_epsilon: ov.retried_with_epsilon,
            diagnostics: ov.diagnostics.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleJson {
    pub degree: usize,
    pub pair: PairJson,
    pub cycle: Vec<TermJson>,
}

impl CycleJson {
    pub fn new(f: &Filtration, pair: &PersistencePair, cycle: &Chain<f64>) -> Self {
        CycleJson { degree: pair.degree, pair: PairJson::from(pair), cycle: chain_terms(f, cycle) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNodeJson {
    pub pair: PairJson,
    /// Death index of the parent node; `null` below the unbounded cell.
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// The top-dimensional simplices of the node's volume.
    pub volume: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeJson {
    pub degree: usize,
    pub nodes: Vec<TreeNodeJson>,
}

impl TreeJson {
    /// Nodes for the pairs accepted by `keep`. Dropped nodes are bypassed: a kept node hangs
    /// below its nearest kept ancestor.
    pub fn new(
        f: &Filtration,
        forest: &PersistenceForest,
        tree: &PersistenceTree,
        keep: impl Fn(&PersistencePair) -> bool,
    ) -> Self {
        let kept: Vec<bool> = tree.pairs.iter().map(&keep).collect();
        let death = |i: usize| tree.pairs[i].death_index.expect("finite") + 1;
        let ancestor = |mut i: usize| {
            while let Some(p) = tree.parent[i] {
                if kept[p] {
                    return Some(p);
                }
                i = p;
            }
            None
        };
        let parents: Vec<Option<usize>> = (0..tree.pairs.len()).map(ancestor).collect();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); tree.pairs.len()];
        for (i, p) in parents.iter().enumerate() {
            if let (true, Some(p)) = (kept[i], p) {
                children[*p].push(death(i));
            }
        }
        let nodes = (0..tree.pairs.len())
            .filter(|&i| kept[i])
            .map(|i| {
                let pair = &tree.pairs[i];
                let volume = volume_from_forest(forest, pair)
                    .expect("tree pairs come from the forest")
                    .into_iter()
                    .map(|k| f.vertices(k).to_vec())
                    .collect();
                let mut kids = std::mem::take(&mut children[i]);
                kids.sort_unstable();
                TreeNodeJson { pair: PairJson::from(pair), parent: parents[i].map(death), children: kids, volume }
            })
            .collect();
        let degree = f.max_dim().unwrap_or(1).saturating_sub(1);
        TreeJson { degree, nodes }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaJson {
    pub ambient_dim: usize,
    pub num_simplices: usize,
    pub counts_by_dim: Vec<usize>,
    pub value_range: Option<[f64; 2]>,
    pub has_points: bool,
    pub weighted: bool,
    pub degrees: Vec<usize>,
    pub tree_available: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointsJson {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorJson {
    pub error: String,
    pub kind: String,
}
