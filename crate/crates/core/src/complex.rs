//! Simplices, chains and filtrations.
//!
//! Filtration indices are 0-based in this crate. Text and JSON formats print them 1-based.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Largest supported simplex dimension.
pub const MAX_DIM: usize = 3;

/// An abstract simplex with strictly increasing vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Simplex(Vec<u32>);

impl Simplex {
    /// Sorts the vertices; rejects empty or repeated vertex lists.
    pub fn new(vertices: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut v: Vec<u32> = vertices.into_iter().collect();
        v.sort_unstable();
        if v.is_empty() {
            return Err(Error::InvalidInput("empty simplex".into()));
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("repeated vertex in simplex {v:?}")));
        }
        Ok(Simplex(v))
    }

    pub(crate) fn from_sorted(v: Vec<u32>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Simplex(v)
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces with their orientation signs `(-1)^i`.
    pub fn facets(&self) -> impl Iterator<Item = (Simplex, i8)> + '_ {
        facets_of(&self.0).map(|(v, s)| (Simplex(v), s))
    }

    pub fn boundary<C: Coefficient>(&self) -> FormalChain<C> {
        let mut out = FormalChain::default();
        for (face, sign) in self.facets() {
            out.add(face, C::from_sign(sign));
        }
        out
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        is_subset(&self.0, &other.0)
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

fn facets_of(v: &[u32]) -> impl Iterator<Item = (Vec<u32>, i8)> + '_ {
    let n = if v.len() > 1 { v.len() } else { 0 };
    (0..n).map(move |i| {
        let mut f = Vec::with_capacity(v.len() - 1);
        f.extend_from_slice(&v[..i]);
        f.extend_from_slice(&v[i + 1..]);
        (f, if i % 2 == 0 { 1 } else { -1 })
    })
}

/// Both slices sorted ascending.
pub(crate) fn is_subset(small: &[u32], big: &[u32]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

/// Coefficient ring for chains: `Z2` or `f64`.
pub trait Coefficient: Copy + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(self, other: Self) -> Self;
    fn from_sign(sign: i8) -> Self;
}

/// The field with two elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Z2(pub bool);

impl Coefficient for Z2 {
    fn zero() -> Self {
        Z2(false)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn add(self, other: Self) -> Self {
        Z2(self.0 ^ other.0)
    }
    fn from_sign(_: i8) -> Self {
        Z2(true)
    }
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn from_sign(sign: i8) -> Self {
        sign as f64
    }
}

/// Chain keyed by simplices rather than filtration indices.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalChain<C> {
    terms: BTreeMap<Simplex, C>,
}

impl<C> Default for FormalChain<C> {
    fn default() -> Self {
        FormalChain { terms: BTreeMap::new() }
    }
}

impl<C: Coefficient> FormalChain<C> {
    pub fn add(&mut self, s: Simplex, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&s) {
            Some(e) => {
                *e = e.add(c);
                if e.is_zero() {
                    self.terms.remove(&s);
                }
            }
            None => {
                self.terms.insert(s, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, &C)> {
        self.terms.iter()
    }

    pub fn get(&self, s: &Simplex) -> Option<C> {
        self.terms.get(s).copied()
    }

    pub fn boundary(&self) -> FormalChain<C>
    where
        C: std::ops::Mul<Output = C>,
    {
        let mut out = FormalChain::default();
        for (s, &c) in &self.terms {
            for (face, sign) in s.facets() {
                out.add(face, c * C::from_sign(sign));
            }
        }
        out
    }
}

impl std::ops::Mul for Z2 {
    type Output = Z2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Z2) -> Z2 {
        Z2(self.0 & rhs.0)
    }
}

/// Sparse chain keyed by filtration index. Never stores zero coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Chain<C> {
    degree: usize,
    terms: BTreeMap<usize, C>,
}

impl<C: Coefficient> Chain<C> {
    pub fn new(degree: usize) -> Self {
        Chain { degree, terms: BTreeMap::new() }
    }

    pub fn from_terms(degree: usize, terms: impl IntoIterator<Item = (usize, C)>) -> Self {
        let mut c = Chain::new(degree);
        for (k, v) in terms {
            c.add_term(k, v);
        }
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn add_term(&mut self, index: usize, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&index) {
            Some(e) => {
                *e = e.add(c);
                if e.is_zero() {
                    self.terms.remove(&index);
                }
            }
            None => {
                self.terms.insert(index, c);
            }
        }
    }

    pub fn get(&self, index: usize) -> C {
        self.terms.get(&index).copied().unwrap_or_else(C::zero)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.terms.contains_key(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, C)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    /// Indices with nonzero coefficient, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.terms.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    pub fn boundary(&self, f: &Filtration) -> Chain<C>
    where
        C: std::ops::Mul<Output = C>,
    {
        let mut out = Chain::new(self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for (&k, &c) in &self.terms {
            for (face, sign) in f.facet_indices(k) {
                out.add_term(face, c * C::from_sign(sign));
            }
        }
        out
    }
}

impl Chain<f64> {
    /// Drops coefficients with magnitude at most `threshold`.
    pub fn pruned(&self, threshold: f64) -> Chain<f64> {
        Chain {
            degree: self.degree,
            terms: self.terms.iter().filter(|(_, v)| v.abs() > threshold).map(|(&k, &v)| (k, v)).collect(),
        }
    }

    /// Reduction mod 2 of the support.
    pub fn to_z2(&self) -> Chain<Z2> {
        Chain { degree: self.degree, terms: self.terms.keys().map(|&k| (k, Z2(true))).collect() }
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|v| v.abs()).sum()
    }
}

impl Chain<Z2> {
    pub fn from_support(degree: usize, support: impl IntoIterator<Item = usize>) -> Self {
        Chain::from_terms(degree, support.into_iter().map(|k| (k, Z2(true))))
    }

    pub fn to_real(&self) -> Chain<f64> {
        Chain { degree: self.degree, terms: self.terms.keys().map(|&k| (k, 1.0)).collect() }
    }
}

/// Filtration order on a finite simplicial complex.
///
/// Immutable once built. The simplex lookup table and coface lists are built lazily.
#[derive(Debug)]
pub struct Filtration {
    ambient_dim: usize,
    verts: Vec<u32>,
    offsets: Vec<usize>,
    values: Vec<f64>,
    points: Option<PointCloud>,
    lookup: OnceLock<HashMap<u128, u32>>,
    cofaces: OnceLock<Vec<Vec<u32>>>,
}

impl Clone for Filtration {
    fn clone(&self) -> Self {
        Filtration {
            ambient_dim: self.ambient_dim,
            verts: self.verts.clone(),
            offsets: self.offsets.clone(),
            values: self.values.clone(),
            points: self.points.clone(),
            lookup: OnceLock::new(),
            cofaces: OnceLock::new(),
        }
    }
}

pub(crate) fn pack(vertices: &[u32]) -> u128 {
    debug_assert!(vertices.len() <= MAX_DIM + 1);
    vertices.iter().fold(0u128, |acc, &v| (acc << 32) | (v as u128 + 1))
}

impl Filtration {
    /// Builds a filtration in the given order and rejects it unless [`validate_filtration`] passes.
    pub fn from_ordered(
        ambient_dim: usize,
        simplices: Vec<(Simplex, f64)>,
        points: Option<PointCloud>,
    ) -> Result<Self> {
        let f = Self::from_ordered_unchecked(ambient_dim, simplices, points)?;
        let report = validate_filtration(&f);
        if report.ok {
            Ok(f)
        } else {
            Err(Error::InvalidFiltration(report))
        }
    }

    /// Builds without the face-order check. Only the simplex dimension bound is enforced.
    pub fn from_ordered_unchecked(
        ambient_dim: usize,
        simplices: Vec<(Simplex, f64)>,
        points: Option<PointCloud>,
    ) -> Result<Self> {
        let mut verts = Vec::new();
        let mut offsets = Vec::with_capacity(simplices.len() + 1);
        let mut values = Vec::with_capacity(simplices.len());
        offsets.push(0);
        for (s, v) in simplices {
            if s.dim() > MAX_DIM {
                return Err(Error::Unsupported(format!(
                    "simplex {s} has dimension {} (maximum {MAX_DIM})",
                    s.dim()
                )));
            }
            verts.extend_from_slice(s.vertices());
            offsets.push(verts.len());
            values.push(v);
        }
        if let Some(p) = &points {
            if p.dim() != ambient_dim {
                return Err(Error::InvalidInput(format!(
                    "point dimension {} differs from ambient dimension {ambient_dim}",
                    p.dim()
                )));
            }
        }
        Ok(Filtration {
            ambient_dim,
            verts,
            offsets,
            values,
            points,
            lookup: OnceLock::new(),
            cofaces: OnceLock::new(),
        })
    }

    pub(crate) fn from_flat(
        ambient_dim: usize,
        verts: Vec<u32>,
        offsets: Vec<usize>,
        values: Vec<f64>,
        points: Option<PointCloud>,
    ) -> Self {
        debug_assert_eq!(offsets.len(), values.len() + 1);
        Filtration { ambient_dim, verts, offsets, values, points, lookup: OnceLock::new(), cofaces: OnceLock::new() }
    }

    /// Attaches (or replaces) vertex coordinates.
    pub fn with_points(mut self, points: PointCloud) -> Result<Self> {
        if points.dim() != self.ambient_dim {
            return Err(Error::InvalidInput("point dimension differs from ambient dimension".into()));
        }
        if let Some(max) = self.verts.iter().max() {
            if *max as usize >= points.len() {
                return Err(Error::InvalidInput(format!("no coordinates for vertex {max}")));
            }
        }
        self.points = Some(points);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self, k: usize) -> &[u32] {
        &self.verts[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn simplex(&self, k: usize) -> Simplex {
        Simplex::from_sorted(self.vertices(k).to_vec())
    }

    pub fn dim(&self, k: usize) -> usize {
        self.offsets[k + 1] - self.offsets[k] - 1
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn points(&self) -> Option<&PointCloud> {
        self.points.as_ref()
    }

    pub fn max_dim(&self) -> Option<usize> {
        (0..self.len()).map(|k| self.dim(k)).max()
    }

    pub fn indices_of_dim(&self, d: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| self.dim(k) == d)
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_dim().map_or(0, |d| d + 1)];
        for k in 0..self.len() {
            counts[self.dim(k)] += 1;
        }
        counts
    }

    fn lookup(&self) -> &HashMap<u128, u32> {
        self.lookup.get_or_init(|| {
            let mut m = HashMap::with_capacity(self.len());
            for k in 0..self.len() {
                m.entry(pack(self.vertices(k))).or_insert(k as u32);
            }
            m
        })
    }

    /// Index of the simplex with exactly these (sorted) vertices.
    pub fn index_of(&self, vertices: &[u32]) -> Option<usize> {
        if vertices.is_empty() || vertices.len() > MAX_DIM + 1 {
            return None;
        }
        self.lookup().get(&pack(vertices)).map(|&k| k as usize)
    }

    /// Facet indices of simplex `k` with orientation signs. Missing facets are skipped.
    pub fn facet_indices(&self, k: usize) -> Vec<(usize, i8)> {
        facets_of(self.vertices(k)).filter_map(|(v, s)| self.index_of(&v).map(|i| (i, s))).collect()
    }

    pub fn boundary_chain<C: Coefficient>(&self, k: usize) -> Chain<C> {
        Chain::from_terms(
            self.dim(k).saturating_sub(1),
            self.facet_indices(k).into_iter().map(|(i, s)| (i, C::from_sign(s))),
        )
    }

    fn coface_lists(&self) -> &Vec<Vec<u32>> {
        self.cofaces.get_or_init(|| {
            let mut lists = vec![Vec::new(); self.len()];
            for k in 0..self.len() {
                for (face, _) in self.facet_indices(k) {
                    lists[face].push(k as u32);
                }
            }
            lists
        })
    }

    /// Indices of simplices of dimension `target_dim` having simplex `k` as a face, ascending.
    pub fn cofaces(&self, k: usize, target_dim: usize) -> Vec<usize> {
        let d = self.dim(k);
        if target_dim < d {
            return Vec::new();
        }
        let lists = self.coface_lists();
        let mut frontier = vec![k];
        for _ in d..target_dim {
            let mut next: Vec<usize> =
                frontier.iter().flat_map(|&j| lists[j].iter().map(|&c| c as usize)).collect();
            next.sort_unstable();
            next.dedup();
            frontier = next;
        }
        frontier
    }

    /// Convenience form of [`Filtration::cofaces`] for a simplex given by vertices.
    pub fn cofaces_of(&self, s: &Simplex, target_dim: usize) -> Vec<usize> {
        match self.index_of(s.vertices()) {
            Some(k) => self.cofaces(k, target_dim),
            None => Vec::new(),
        }
    }

    /// `(simplex, value)` list in filtration order.
    pub fn to_list(&self) -> Vec<(Simplex, f64)> {
        (0..self.len()).map(|k| (self.simplex(k), self.value(k))).collect()
    }

    /// Euler characteristic of the whole complex.
    pub fn euler_characteristic(&self) -> i64 {
        (0..self.len()).map(|k| if self.dim(k).is_multiple_of(2) { 1 } else { -1 }).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonFiniteValue { index: usize },
    Duplicate { index: usize, first: usize },
    MissingFace { index: usize, face: Vec<u32> },
    FaceAfterCoface { index: usize, face: usize },
    FaceValueGreater { index: usize, face: usize },
    DecreasingValue { index: usize },
    DimensionExceedsAmbient { index: usize },
}

impl Violation {
    pub fn index(&self) -> usize {
        match *self {
            Violation::NonFiniteValue { index }
            | Violation::Duplicate { index, .. }
            | Violation::MissingFace { index, .. }
            | Violation::FaceAfterCoface { index, .. }
            | Violation::FaceValueGreater { index, .. }
            | Violation::DecreasingValue { index }
            | Violation::DimensionExceedsAmbient { index } => index,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFiniteValue { index } => write!(f, "simplex {} has a non-finite value", index + 1),
            Violation::Duplicate { index, first } => {
                write!(f, "simplex {} repeats simplex {}", index + 1, first + 1)
            }
            Violation::MissingFace { index, face } => {
                write!(f, "simplex {} has face {face:?} missing from the filtration", index + 1)
            }
            Violation::FaceAfterCoface { index, face } => {
                write!(f, "simplex {} precedes its face {}", index + 1, face + 1)
            }
            Violation::FaceValueGreater { index, face } => {
                write!(f, "simplex {} has a smaller value than its face {}", index + 1, face + 1)
            }
            Violation::DecreasingValue { index } => {
                write!(f, "simplex {} has a smaller value than its predecessor", index + 1)
            }
            Violation::DimensionExceedsAmbient { index } => {
                write!(f, "simplex {} has dimension above the ambient dimension", index + 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "ok");
        }
        let shown: Vec<String> = self.violations.iter().take(5).map(|v| v.to_string()).collect();
        write!(f, "{}", shown.join("; "))?;
        if self.violations.len() > 5 {
            write!(f, "; and {} more", self.violations.len() - 5)?;
        }
        Ok(())
    }
}

/// Checks that every face precedes its cofaces with no larger value, values are
/// nondecreasing in index order, no simplex repeats.
pub fn validate_filtration(f: &Filtration) -> ValidationReport {
    let mut violations = Vec::new();
    let mut first_seen: HashMap<u128, usize> = HashMap::with_capacity(f.len());
    for k in 0..f.len() {
        let key = pack(f.vertices(k));
        if let Some(&first) = first_seen.get(&key) {
            violations.push(Violation::Duplicate { index: k, first });
        } else {
            first_seen.insert(key, k);
        }
    }
    for k in 0..f.len() {
        let v = f.value(k);
        if !v.is_finite() {
            violations.push(Violation::NonFiniteValue { index: k });
            continue;
        }
        if k > 0 && f.value(k - 1).is_finite() && v < f.value(k - 1) {
            violations.push(Violation::DecreasingValue { index: k });
        }
        if f.dim(k) > f.ambient_dim() {
            violations.push(Violation::DimensionExceedsAmbient { index: k });
        }
        for (face, _) in facets_of(f.vertices(k)) {
            match first_seen.get(&pack(&face)) {
                None => violations.push(Violation::MissingFace { index: k, face }),
                Some(&j) => {
                    if j > k {
                        violations.push(Violation::FaceAfterCoface { index: k, face: j });
                    }
                    if f.value(j) > v {
                        violations.push(Violation::FaceValueGreater { index: k, face: j });
                    }
                }
            }
        }
    }
    ValidationReport { ok: violations.is_empty(), violations }
}

/// Orders simplices by `(value, dim, lexicographic vertices)` and validates the result.
pub fn canonical_sort(
    ambient_dim: usize,
    mut raw: Vec<(Simplex, f64)>,
    points: Option<PointCloud>,
) -> Result<Filtration> {
    if let Some((s, _)) = raw.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("simplex {s} has a non-finite value")));
    }
    let value_of: HashMap<&Simplex, f64> = raw.iter().map(|(s, v)| (s, *v)).collect();
    for (s, v) in &raw {
        for (face, _) in s.facets() {
            match value_of.get(&face) {
                None => return Err(Error::InvalidInput(format!("face {face} of {s} is missing"))),
                Some(&fv) if fv > *v => {
                    return Err(Error::InvalidInput(format!(
                        "face {face} has value {fv} larger than {v} of its coface {s}"
                    )))
                }
                _ => {}
            }
        }
    }
    drop(value_of);
    raw.sort_by(|(a, va), (b, vb)| va.total_cmp(vb).then(a.dim().cmp(&b.dim())).then_with(|| a.cmp(b)));
    Filtration::from_ordered(ambient_dim, raw, points)
}
