//! Persistent homology of filtered simplicial complexes with volume-optimal cycles.
//!
//! The pipeline: build an alpha [`Filtration`] from points ([`alpha`]), reduce its boundary
//! matrix ([`persistence`]), then explain a pair either by an optimal volume found with a
//! linear program ([`volume`]) or, in codimension one, by the merge tree ([`merge_tree`]).

pub mod alpha;
pub mod complex;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod json;
pub mod lp;
pub mod merge_tree;
pub mod persistence;
pub mod synthetic;
pub mod volume;

pub use alpha::{build_alpha_filtration, delaunay, jitter};
pub use complex::{canonical_sort, validate_filtration, Chain, Filtration, Simplex, ValidationReport, Violation, Z2};
pub use error::{Error, ErrorKind, Result};
pub use geometry::PointCloud;
pub use merge_tree::{compute_forest, persistence_tree, DualCell, PersistenceForest, PersistenceTree};
pub use persistence::{diagram, reduce, PersistencePair, ReducedMatrices};
pub use volume::{optimal_cycle, optimal_volume, OptimalVolume, Radius, VolumeOptions};
