//! Z₂ boundary-matrix reduction, persistence diagrams and persistence cycles.

use crate::complex::{Chain, Filtration, Z2};
use crate::error::{Error, Result};

/// A birth-death pair. Indices are 0-based filtration indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub degree: usize,
    pub birth_index: usize,
    pub death_index: Option<usize>,
    pub birth_value: f64,
    pub death_value: Option<f64>,
}

impl PersistencePair {
    pub fn is_essential(&self) -> bool {
        self.death_index.is_none()
    }

    /// Death value minus birth value; infinite for essential pairs.
    pub fn persistence(&self) -> f64 {
        self.death_value.map_or(f64::INFINITY, |d| d - self.birth_value)
    }

    /// Born and killed at the same filtration value.
    pub fn is_zero_persistence(&self) -> bool {
        self.death_value == Some(self.birth_value)
    }

    /// `(birth_index, death_index)` pair.
    pub fn indices(&self) -> (usize, Option<usize>) {
        (self.birth_index, self.death_index)
    }
}

/// The decomposition `R = D·V` with `V` upper unitriangular and `R` reduced.
#[derive(Debug, Clone)]
pub struct ReducedMatrices {
    r: Vec<Vec<u32>>,
    v: Vec<Vec<u32>>,
    pivot_col: Vec<Option<u32>>,
}

/// Symmetric difference of two ascending index lists, written into `a`.
pub(crate) fn xor_sorted(a: &mut Vec<u32>, b: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&a[i..]);
    scratch.extend_from_slice(&b[j..]);
    std::mem::swap(a, scratch);
}

fn boundary_column(f: &Filtration, k: usize) -> Vec<u32> {
    let mut col: Vec<u32> = f.facet_indices(k).into_iter().map(|(i, _)| i as u32).collect();
    col.sort_unstable();
    col
}

/// Left-to-right column reduction over Z₂.
pub fn reduce(f: &Filtration) -> ReducedMatrices {
    let n = f.len();
    let mut r: Vec<Vec<u32>> = Vec::with_capacity(n);
    let mut v: Vec<Vec<u32>> = Vec::with_capacity(n);
    let mut pivot_col: Vec<Option<u32>> = vec![None; n];
    let mut scratch = Vec::new();
    for j in 0..n {
        let mut col = boundary_column(f, j);
        let mut vcol = vec![j as u32];
        while let Some(&low) = col.last() {
            match pivot_col[low as usize] {
                Some(k) => {
                    xor_sorted(&mut col, &r[k as usize], &mut scratch);
                    xor_sorted(&mut vcol, &v[k as usize], &mut scratch);
                }
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            pivot_col[low as usize] = Some(j as u32);
        }
        r.push(col);
        v.push(vcol);
    }
    ReducedMatrices { r, v, pivot_col }
}

impl ReducedMatrices {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_column(&self, j: usize) -> &[u32] {
        &self.r[j]
    }

    pub fn v_column(&self, j: usize) -> &[u32] {
        &self.v[j]
    }

    pub fn low(&self, j: usize) -> Option<usize> {
        self.r[j].last().map(|&l| l as usize)
    }

    /// Column whose lowest one sits in row `i`.
    pub fn column_with_low(&self, i: usize) -> Option<usize> {
        self.pivot_col[i].map(|c| c as usize)
    }

    fn make_pair(&self, f: &Filtration, b: usize, d: Option<usize>) -> PersistencePair {
        PersistencePair {
            degree: f.dim(b),
            birth_index: b,
            death_index: d,
            birth_value: f.value(b),
            death_value: d.map(|d| f.value(d)),
        }
    }

    /// All pairs of every degree, including zero-persistence pairs, sorted by birth index.
    pub fn pairs(&self, f: &Filtration) -> Vec<PersistencePair> {
        let mut out = Vec::new();
        for b in 0..self.len() {
            if !self.r[b].is_empty() {
                continue;
            }
            out.push(self.make_pair(f, b, self.column_with_low(b)));
        }
        out
    }

    /// Degree-`q` pairs sorted by birth index. Zero-persistence pairs are kept.
    pub fn diagram(&self, f: &Filtration, q: usize) -> Vec<PersistencePair> {
        self.pairs(f).into_iter().filter(|p| p.degree == q).collect()
    }

    /// The pair born at simplex `b`, if `b` is positive.
    pub fn pair_by_birth(&self, f: &Filtration, b: usize) -> Option<PersistencePair> {
        (b < self.len() && self.r[b].is_empty()).then(|| self.make_pair(f, b, self.column_with_low(b)))
    }

    /// The finite pair killed by simplex `d`, if `d` is negative.
    pub fn pair_by_death(&self, f: &Filtration, d: usize) -> Option<PersistencePair> {
        if d >= self.len() {
            return None;
        }
        self.low(d).map(|b| self.make_pair(f, b, Some(d)))
    }

    /// R-column of the death simplex for finite pairs, V-column of the birth simplex otherwise.
    pub fn persistence_cycle(&self, pair: &PersistencePair) -> Chain<Z2> {
        let support = match pair.death_index {
            Some(d) => &self.r[d],
            None => &self.v[pair.birth_index],
        };
        Chain::from_support(pair.degree, support.iter().map(|&k| k as usize))
    }

    /// Whether the Z₂ chain lies in the span of boundary columns `0..=upto`.
    pub fn in_boundary_space(&self, z: &Chain<Z2>, upto: Option<usize>) -> bool {
        let Some(upto) = upto else {
            return z.is_empty();
        };
        let mut col: Vec<u32> = z.support().into_iter().map(|k| k as u32).collect();
        let mut scratch = Vec::new();
        while let Some(&low) = col.last() {
            match self.pivot_col.get(low as usize).copied().flatten() {
                Some(c) if (c as usize) <= upto => xor_sorted(&mut col, &self.r[c as usize], &mut scratch),
                _ => return false,
            }
        }
        true
    }

    /// Persistence-cycle conditions for `z` with respect to `pair`.
    pub fn check_cycle_conditions(&self, f: &Filtration, pair: &PersistencePair, z: &Chain<Z2>) -> bool {
        let b = pair.birth_index;
        if z.is_empty() || z.iter().any(|(k, _)| k >= f.len() || f.dim(k) != pair.degree) {
            return false;
        }
        if !z.boundary(f).is_empty() {
            return false;
        }
        if !z.contains(b) || z.max_index() != Some(b) {
            return false;
        }
        match pair.death_index {
            Some(d) => self.in_boundary_space(z, Some(d)) && !self.in_boundary_space(z, d.checked_sub(1)),
            None => !self.in_boundary_space(z, f.len().checked_sub(1)),
        }
    }

    /// Recomputes `D·V` and compares it with `R`.
    pub fn verify_decomposition(&self, f: &Filtration) -> bool {
        let mut scratch = Vec::new();
        (0..self.len()).all(|j| {
            let mut acc: Vec<u32> = Vec::new();
            for &k in &self.v[j] {
                xor_sorted(&mut acc, &boundary_column(f, k as usize), &mut scratch);
            }
            acc == self.r[j] && self.v[j].last() == Some(&(j as u32))
        })
    }
}

/// Degree-`q` diagram including zero-persistence pairs.
pub fn diagram(f: &Filtration, q: usize) -> Vec<PersistencePair> {
    reduce(f).diagram(f, q)
}

pub fn persistence_cycle(f: &Filtration, pair: &PersistencePair) -> Result<Chain<Z2>> {
    let rm = reduce(f);
    check_pair(&rm, f, pair)?;
    Ok(rm.persistence_cycle(pair))
}

pub fn check_cycle_conditions(f: &Filtration, pair: &PersistencePair, z: &Chain<Z2>) -> bool {
    reduce(f).check_cycle_conditions(f, pair, z)
}

pub(crate) fn check_pair(rm: &ReducedMatrices, f: &Filtration, pair: &PersistencePair) -> Result<()> {
    match rm.pair_by_birth(f, pair.birth_index) {
        Some(p) if p.death_index == pair.death_index => Ok(()),
        _ => Err(Error::InvalidInput(format!(
            "({}, {}) is not a persistence pair",
            pair.birth_index + 1,
            pair.death_index.map_or("inf".to_string(), |d| (d + 1).to_string())
        ))),
    }
}

/// Sum over degrees of `(-1)^q` times the number of essential pairs.
pub fn essential_euler(pairs: &[PersistencePair]) -> i64 {
    pairs.iter().filter(|p| p.is_essential()).map(|p| if p.degree % 2 == 0 { 1 } else { -1 }).sum()
}
