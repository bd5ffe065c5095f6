//! A loaded filtration with memoized reductions and a result cache that runs each distinct
//! computation once.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use pervol_core::json::{CycleJson, DiagramJson, MetaJson, PointsJson, TreeJson, VolumeJson};
use pervol_core::merge_tree::diagram_from_forest;
use pervol_core::volume::optimal_cycle;
use pervol_core::{
    compute_forest, optimal_volume, persistence_tree, reduce, Error, ErrorKind, Filtration, OptimalVolume,
    PersistenceForest, PersistencePair, PersistenceTree, ReducedMatrices, VolumeOptions,
};
use serde::Serialize;

/// Which algorithm computes a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, clap::ValueEnum)]
pub enum Engine {
    /// Merge tree for degree n−1 when the complex allows it, reduction otherwise.
    #[default]
    Auto,
    Reduction,
    #[value(name = "mergetree")]
    MergeTree,
}

/// An error as reported to the user, with the kind that selects the exit code or HTTP status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub kind: ErrorKind,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { kind: ErrorKind::Input, message: message.into() }
    }

    pub fn unsupported(message: impl Into<String>) -> Self {
        Failure { kind: ErrorKind::Unsupported, message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        exit_code(self.kind)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ErrorKind::Input => "input",
            ErrorKind::Unsupported => "unsupported",
            ErrorKind::Numerical => "numerical",
            ErrorKind::Internal => "internal",
        }
    }
}

/// 2 for bad input, 3 for unsupported queries, 4 for solver failures.
pub fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Input => 2,
        ErrorKind::Unsupported => 3,
        ErrorKind::Numerical | ErrorKind::Internal => 4,
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { kind: e.kind(), message: e.to_string() }
    }
}

pub type Outcome = Result<Arc<str>, Failure>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Meta,
    Points,
    Diagram { degree: usize, engine: Engine, include_zero: bool },
    Tree { include_zero: bool },
    Volume { death: usize, radius: Option<u64>, epsilon: Option<u64> },
    Cycle { index: usize, by_birth: bool },
}

type Codim1 = (PersistenceForest, PersistenceTree);

pub struct Session {
    filt: Filtration,
    reduced: OnceLock<ReducedMatrices>,
    pairs: OnceLock<Vec<PersistencePair>>,
    codim1: OnceLock<Result<Codim1, Failure>>,
    cache: Mutex<HashMap<Key, Arc<OnceLock<Outcome>>>>,
    computations: AtomicUsize,
}

impl Session {
    pub fn new(filt: Filtration) -> Self {
        Session {
            filt,
            reduced: OnceLock::new(),
            pairs: OnceLock::new(),
            codim1: OnceLock::new(),
            cache: Mutex::new(HashMap::new()),
            computations: AtomicUsize::new(0),
        }
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filt
    }

    /// Number of cache entries computed so far.
    pub fn computations(&self) -> usize {
        self.computations.load(Ordering::SeqCst)
    }

    pub fn reduced(&self) -> &ReducedMatrices {
        self.reduced.get_or_init(|| reduce(&self.filt))
    }

    /// Every pair of every degree.
    pub fn pairs(&self) -> &[PersistencePair] {
        self.pairs.get_or_init(|| self.reduced().pairs(&self.filt))
    }

    /// Merge forest and persistence tree, when the complex meets the merge-tree conditions.
    pub fn codim1(&self) -> Result<&Codim1, Failure> {
        self.codim1
            .get_or_init(|| {
                merge_tree_applicable(&self.filt)?;
                let forest = compute_forest(&self.filt)?;
                let tree = persistence_tree(&forest, &self.filt);
                Ok((forest, tree))
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn cached(&self, key: Key, compute: impl FnOnce() -> Result<String, Failure>) -> Outcome {
        let cell = {
            let mut map = self.cache.lock().expect("cache lock");
            Arc::clone(map.entry(key).or_default())
        };
        cell.get_or_init(|| {
            self.computations.fetch_add(1, Ordering::SeqCst);
            compute().map(Arc::from)
        })
        .clone()
    }

    pub fn meta(&self) -> Outcome {
        self.cached(Key::Meta, || {
            let f = &self.filt;
            let values = f.values();
            let value_range = (!values.is_empty()).then(|| {
                [values.iter().copied().fold(f64::INFINITY, f64::min), values.iter().copied().fold(f64::NEG_INFINITY, f64::max)]
            });
            to_json(&MetaJson {
                ambient_dim: f.ambient_dim(),
                num_simplices: f.len(),
                counts_by_dim: f.count_by_dim(),
                value_range,
                has_points: f.points().is_some(),
                weighted: f.points().is_some_and(|p| p.is_weighted()),
                degrees: f.max_dim().map_or(Vec::new(), |m| (0..=m).collect()),
                tree_available: self.codim1().is_ok(),
            })
        })
    }

    pub fn points(&self) -> Outcome {
        self.cached(Key::Points, || {
            let pc = self.filt.points().ok_or_else(|| Failure::unsupported("the filtration has no vertex coordinates"))?;
            to_json(&PointsJson {
                dim: pc.dim(),
                points: pc.points().map(<[f64]>::to_vec).collect(),
                weights: pc.weights().map(<[f64]>::to_vec),
            })
        })
    }

    /// Degree `degree` pairs from the chosen engine, sorted by birth index.
    pub fn diagram_pairs(&self, degree: usize, engine: Engine) -> Result<Vec<PersistencePair>, Failure> {
        let n = self.filt.ambient_dim();
        let codim_one = n >= 1 && degree == n - 1;
        let from_forest = |c: &Codim1| diagram_from_forest(&c.0, &self.filt);
        match engine {
            Engine::Reduction => Ok(self.reduced().diagram(&self.filt, degree)),
            Engine::MergeTree if !codim_one => Err(Failure::unsupported(format!(
                "the merge-tree engine computes degree {} only (ambient dimension {n})",
                n.saturating_sub(1)
            ))),
            Engine::MergeTree => self.codim1().map(from_forest),
            Engine::Auto => match self.codim1() {
                Ok(c) if codim_one => Ok(from_forest(c)),
                _ => Ok(self.reduced().diagram(&self.filt, degree)),
            },
        }
    }

    pub fn diagram(&self, degree: usize, engine: Engine, include_zero: bool) -> Outcome {
        self.cached(Key::Diagram { degree, engine, include_zero }, || {
            let pairs: Vec<PersistencePair> = self
                .diagram_pairs(degree, engine)?
                .into_iter()
                .filter(|p| include_zero || !p.is_zero_persistence())
                .collect();
            to_json(&DiagramJson::new(degree, &pairs))
        })
    }

    pub fn tree(&self, include_zero: bool) -> Outcome {
        self.cached(Key::Tree { include_zero }, || {
            let (forest, tree) = self.codim1()?;
            to_json(&TreeJson::new(&self.filt, forest, tree, |p| include_zero || !p.is_zero_persistence()))
        })
    }

    /// Volume optimal cycle of the finite pair whose death simplex has 1-based index `death`.
    pub fn solve_volume(&self, death: usize, radius: Option<f64>, epsilon: Option<f64>) -> Result<OptimalVolume, Failure> {
        let pair = self.finite_pair(death)?;
        let mut opts = VolumeOptions { radius, ..VolumeOptions::default() };
        if let Some(e) = epsilon {
            if !(e.is_finite() && e > 0.0) {
                return Err(Failure::input(format!("epsilon {e} is not positive")));
            }
            opts.epsilon = e;
        }
        Ok(optimal_volume(&self.filt, &pair, self.pairs(), &opts)?)
    }

    pub fn volume(&self, death: usize, radius: Option<f64>, epsilon: Option<f64>) -> Outcome {
        let key = Key::Volume { death, radius: radius.map(f64::to_bits), epsilon: epsilon.map(f64::to_bits) };
        self.cached(key, || {
            let ov = self.solve_volume(death, radius, epsilon)?;
            to_json(&VolumeJson::new(&self.filt, &ov))
        })
    }

    /// Optimal cycle of the pair with 1-based death index `index`, or birth index if `by_birth`.
    pub fn cycle(&self, index: usize, by_birth: bool) -> Outcome {
        self.cached(Key::Cycle { index, by_birth }, || {
            let k = self.simplex(index)?;
            let rm = self.reduced();
            let pair = if by_birth { rm.pair_by_birth(&self.filt, k) } else { rm.pair_by_death(&self.filt, k) };
            let role = if by_birth { "birth" } else { "death" };
            let pair = pair.ok_or_else(|| Failure::input(format!("simplex {index} is not the {role} simplex of any pair")))?;
            let cycle = optimal_cycle(&self.filt, rm, &pair)?;
            to_json(&CycleJson::new(&self.filt, &pair, &cycle))
        })
    }

    fn simplex(&self, index: usize) -> Result<usize, Failure> {
        if index == 0 || index > self.filt.len() {
            return Err(Failure::input(format!("index {index} is outside 1..={}", self.filt.len())));
        }
        Ok(index - 1)
    }

    fn finite_pair(&self, death: usize) -> Result<PersistencePair, Failure> {
        let k = self.simplex(death)?;
        let rm = self.reduced();
        if let Some(p) = rm.pair_by_death(&self.filt, k) {
            return Ok(p);
        }
        match rm.pair_by_birth(&self.filt, k) {
            Some(p) if p.is_essential() => Err(Failure::unsupported(format!(
                "simplex {death} creates a degree {} class that never dies: it bounds no volume, so we cannot define \
                 the volume optimal cycle",
                p.degree
            ))),
            Some(p) => Err(Failure::input(format!(
                "simplex {death} is the birth simplex of the pair dying at {}; pairs are addressed by death index",
                p.death_index.expect("finite") + 1
            ))),
            None => Err(Failure::input(format!("simplex {death} is not the death simplex of any pair"))),
        }
    }
}

fn to_json(value: &impl Serialize) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure { kind: ErrorKind::Internal, message: e.to_string() })
}

/// Checks that the merge tree sees every degree n−1 class: top-dimensional simplices exist and
/// the complex is connected with Euler characteristic 1. The dual graph checks happen in
/// `compute_forest`.
fn merge_tree_applicable(f: &Filtration) -> Result<(), Failure> {
    let n = f.ambient_dim();
    if n == 0 || f.max_dim() != Some(n) {
        return Err(Failure::unsupported(format!("the merge tree needs {n}-simplices in ambient dimension {n}")));
    }
    let chi = f.euler_characteristic();
    if chi != 1 {
        return Err(Failure::unsupported(format!("the merge tree needs Euler characteristic 1, found {chi}")));
    }
    let vertices: Vec<usize> = f.indices_of_dim(0).collect();
    let slot: HashMap<u32, usize> = vertices.iter().enumerate().map(|(i, &k)| (f.vertices(k)[0], i)).collect();
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = vertices.len();
    for k in f.indices_of_dim(1) {
        let v = f.vertices(k);
        let (a, b) = (find(&mut parent, slot[&v[0]]), find(&mut parent, slot[&v[1]]));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    if components != 1 {
        return Err(Failure::unsupported(format!("the merge tree needs a connected complex, found {components} components")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pervol_core::fixtures;

    #[test]
    fn essential_birth_index_is_unsupported() {
        let s = Session::new(fixtures::hollow_square());
        let err = s.volume(8, None, None).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Unsupported);
        assert!(err.message.contains("cannot define the volume optimal cycle"));
    }

    #[test]
    fn addressing_errors_are_input_errors() {
        let s = Session::new(fixtures::filled_triangle());
        for bad in [0, 6, 8] {
            assert_eq!(s.volume(bad, None, None).unwrap_err().kind, ErrorKind::Input, "index {bad}");
        }
        assert!(s.volume(7, None, None).is_ok());
    }

    #[test]
    fn merge_tree_rejects_complexes_with_holes() {
        assert!(Session::new(fixtures::hollow_square()).codim1().is_err());
        assert!(Session::new(fixtures::filled_triangle()).codim1().is_ok());
    }

    #[test]
    fn repeated_queries_hit_the_cache() {
        let s = Session::new(fixtures::double_annulus());
        let a = s.diagram(1, Engine::Reduction, false).unwrap();
        let b = s.diagram(1, Engine::Reduction, false).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(s.computations(), 1);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(ErrorKind::Input), 2);
        assert_eq!(exit_code(ErrorKind::Unsupported), 3);
        assert_eq!(exit_code(ErrorKind::Numerical), 4);
    }
}
