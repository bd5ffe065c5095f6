//! Delaunay (regular) triangulations and (weighted) alpha filtrations in ℝ² and ℝ³.
//!
//! The triangulation is grown facet by facet: for every facet, the apex on the unexplored
//! side is the point whose power sphere through the facet moves least along the facet normal.
//! Exact cospherical ties are reported as degeneracies rather than resolved.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{canonical_sort, Filtration, Simplex};
use crate::error::{Error, Result};
use crate::geometry::{dot, hyperplane_normal, power_sphere, signed_sqrt, sub, PointCloud};

/// Relative tolerance for cospherical and coplanar degeneracies.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Half-width of the opt-in jitter box.
pub const JITTER_AMPLITUDE: f64 = 1e-6;

/// Top-dimensional simplices of a Delaunay triangulation, each with sorted vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    pub dim: usize,
    pub top: Vec<Vec<u32>>,
}

impl Triangulation {
    /// Every face of every top simplex, sorted by dimension then lexicographically.
    pub fn all_simplices(&self) -> Vec<Vec<u32>> {
        let mut set: HashSet<Vec<u32>> = HashSet::new();
        for t in &self.top {
            let k = t.len();
            for mask in 1u32..(1 << k) {
                set.insert((0..k).filter(|i| mask & (1 << i) != 0).map(|i| t[i]).collect());
            }
        }
        let mut all: Vec<Vec<u32>> = set.into_iter().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim + 1];
        for s in self.all_simplices() {
            counts[s.len() - 1] += 1;
        }
        counts
    }
}

/// Adds seeded uniform noise in `[-JITTER_AMPLITUDE, JITTER_AMPLITUDE]ⁿ` to every point.
pub fn jitter(pc: &PointCloud, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = pc
        .points()
        .map(|p| p.iter().map(|x| x + rng.gen_range(-JITTER_AMPLITUDE..=JITTER_AMPLITUDE)).collect())
        .collect();
    PointCloud::new(pc.dim(), pts, pc.weights().map(<[f64]>::to_vec)).expect("jitter keeps the shape")
}

struct Wrapper<'a> {
    pc: &'a PointCloud,
    scale: f64,
}

impl Wrapper<'_> {
    fn degenerate(&self, mut ids: Vec<u32>, reason: &str) -> Error {
        ids.sort_unstable();
        ids.dedup();
        Error::Degenerate { points: ids.into_iter().map(|v| v as usize).collect(), reason: reason.into() }
    }

    /// Apex across `facet` on the side opposite to `away_from` (or the occupied side of a hull facet).
    fn apex(&self, facet: &[u32], away_from: Option<u32>) -> Result<Option<u32>> {
        let pc = self.pc;
        let pts: Vec<&[f64]> = facet.iter().map(|&v| pc.point(v as usize)).collect();
        let w: Vec<f64> = facet.iter().map(|&v| pc.weight(v as usize)).collect();
        let normal = hyperplane_normal(&pts).ok_or_else(|| self.degenerate(facet.to_vec(), "repeated points"))?;
        let sphere = power_sphere(&pts, &w).ok_or_else(|| self.degenerate(facet.to_vec(), "affinely dependent facet"))?;
        let h_tol = DEGENERACY_TOL * self.scale;
        let offset = |q: usize| dot(&normal, &sub(pc.point(q), &sphere.center));
        let side = match away_from {
            Some(p) => -offset(p as usize).signum(),
            None => {
                let far = (0..pc.len())
                    .filter(|q| !facet.contains(&(*q as u32)))
                    .map(offset)
                    .max_by(|a, b| a.abs().total_cmp(&b.abs()));
                match far {
                    Some(h) if h.abs() > h_tol => h.signum(),
                    _ => return Err(self.degenerate((0..pc.len() as u32).collect(), "all points lie in a common hyperplane")),
                }
            }
        };
        let mut best: Option<(f64, u32)> = None;
        let mut runner_up: Option<(f64, u32)> = None;
        for q in 0..pc.len() {
            if facet.contains(&(q as u32)) {
                continue;
            }
            let h = side * offset(q);
            let excess = pc.power(q, &sphere.center) - sphere.radius2;
            if h.abs() <= h_tol {
                if excess < -DEGENERACY_TOL * self.scale * self.scale {
                    let mut ids = facet.to_vec();
                    ids.push(q as u32);
                    return Err(self.degenerate(ids, "point in the hyperplane of a facet, inside its sphere"));
                }
                continue;
            }
            if h < 0.0 {
                continue;
            }
            let t = excess / (2.0 * h);
            match best {
                Some((bt, _)) if t >= bt => {
                    if runner_up.is_none_or(|(rt, _)| t < rt) {
                        runner_up = Some((t, q as u32));
                    }
                }
                _ => {
                    runner_up = best;
                    best = Some((t, q as u32));
                }
            }
        }
        if let (Some((bt, b)), Some((rt, r))) = (best, runner_up) {
            if rt - bt <= DEGENERACY_TOL * self.scale {
                let mut ids = facet.to_vec();
                ids.extend([b, r]);
                return Err(self.degenerate(ids, "cospherical points"));
            }
        }
        Ok(best.map(|(_, q)| q))
    }

    fn hull_facet(&self) -> Result<Vec<u32>> {
        let pc = self.pc;
        let all: Vec<u32> = (0..pc.len() as u32).collect();
        let p = |i: u32| pc.point(i as usize);
        match pc.dim() {
            2 => {
                let v0 = *all.iter().min_by(|&&a, &&b| p(a)[0].total_cmp(&p(b)[0]).then(p(a)[1].total_cmp(&p(b)[1]))).unwrap();
                let v1 = wrap_2d(&all, v0, |i| [p(i)[0], p(i)[1]]);
                Ok(vec![v0.min(v1), v0.max(v1)])
            }
            _ => {
                let v0 = *all
                    .iter()
                    .min_by(|&&a, &&b| {
                        p(a)[1].total_cmp(&p(b)[1]).then(p(a)[2].total_cmp(&p(b)[2])).then(p(a)[0].total_cmp(&p(b)[0]))
                    })
                    .unwrap();
                let v1 = wrap_2d(&all, v0, |i| [p(i)[1], p(i)[2]]);
                let e = sub(p(v1), p(v0));
                let orient = |c: u32, q: u32| {
                    let a = sub(p(c), p(v0));
                    let b = sub(p(q), p(v0));
                    let n = [e[1] * a[2] - e[2] * a[1], e[2] * a[0] - e[0] * a[2], e[0] * a[1] - e[1] * a[0]];
                    dot(&n, &b)
                };
                let mut cand = *all.iter().find(|&&q| q != v0 && q != v1).ok_or_else(|| self.degenerate(all.clone(), "too few points"))?;
                for &q in &all {
                    if q != v0 && q != v1 && q != cand && orient(cand, q) < 0.0 {
                        cand = q;
                    }
                }
                let mut f = vec![v0, v1, cand];
                f.sort_unstable();
                Ok(f)
            }
        }
    }
}

/// Index of the point that follows `v0` counter-clockwise on the hull of the projected points.
fn wrap_2d(all: &[u32], v0: u32, proj: impl Fn(u32) -> [f64; 2]) -> u32 {
    let o = proj(v0);
    let mut cand: Option<u32> = None;
    for &q in all {
        if q == v0 || proj(q) == o {
            continue;
        }
        let Some(c) = cand else {
            cand = Some(q);
            continue;
        };
        let a = proj(c);
        let b = proj(q);
        let cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
        let closer = (b[0] - o[0]).powi(2) + (b[1] - o[1]).powi(2) < (a[0] - o[0]).powi(2) + (a[1] - o[1]).powi(2);
        if cross < 0.0 || (cross == 0.0 && closer) {
            cand = Some(q);
        }
    }
    cand.unwrap_or(v0)
}

/// Delaunay triangulation (regular triangulation when weighted).
pub fn delaunay(pc: &PointCloud) -> Result<Triangulation> {
    let n = pc.dim();
    if pc.len() < n + 1 {
        return Err(Error::InvalidInput(format!("{} points cannot span ℝ^{n}", pc.len())));
    }
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    for (i, p) in pc.points().enumerate() {
        if let Some(j) = seen.insert(p.iter().map(|x| x.to_bits()).collect(), i) {
            return Err(Error::Degenerate { points: vec![j, i], reason: "duplicate points".into() });
        }
    }
    let w = Wrapper { pc, scale: pc.bbox_diameter().max(f64::MIN_POSITIVE) };
    let hull = w.hull_facet()?;
    let first = w.apex(&hull, None)?.ok_or_else(|| w.degenerate(hull.clone(), "no apex above a hull facet"))?;
    let mut start = hull.clone();
    start.push(first);
    start.sort_unstable();

    let mut simplices: HashSet<Vec<u32>> = HashSet::from([start.clone()]);
    let mut top = vec![start.clone()];
    let mut done: HashSet<Vec<u32>> = HashSet::new();
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for i in 0..s.len() {
            let mut facet = s.clone();
            let opposite = facet.remove(i);
            if !done.insert(facet.clone()) {
                continue;
            }
            if let Some(a) = w.apex(&facet, Some(opposite))? {
                let mut next = facet;
                next.push(a);
                next.sort_unstable();
                if simplices.insert(next.clone()) {
                    top.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    top.sort();
    Ok(Triangulation { dim: n, top })
}

/// Squared (ortho)radius values of every simplex of the triangulation, keyed by vertices.
fn alpha_squared(pc: &PointCloud, tri: &Triangulation) -> Result<HashMap<Vec<u32>, f64>> {
    let all = tri.all_simplices();
    let mut cofaces: HashMap<&[u32], Vec<usize>> = HashMap::new();
    for (k, s) in all.iter().enumerate() {
        if s.len() < 2 {
            continue;
        }
        for i in 0..s.len() {
            let mut f = s.clone();
            f.remove(i);
            let key = all.binary_search_by(|x| x.len().cmp(&f.len()).then_with(|| x.cmp(&f))).expect("face closure");
            cofaces.entry(all[key].as_slice()).or_default().push(k);
        }
    }
    let mut value: Vec<f64> = vec![f64::NAN; all.len()];
    for k in (0..all.len()).rev() {
        let s = &all[k];
        let sphere = pc
            .ortho_sphere(s)
            .ok_or_else(|| Error::Degenerate { points: s.iter().map(|&v| v as usize).collect(), reason: "flat simplex".into() })?;
        let cof = cofaces.get(s.as_slice()).map_or(&[][..], Vec::as_slice);
        let attached = cof.iter().any(|&c| {
            all[c].iter().filter(|v| !s.contains(v)).any(|&v| pc.power(v as usize, &sphere.center) < sphere.radius2)
        });
        let min_coface = cof.iter().map(|&c| value[c]).fold(f64::INFINITY, f64::min);
        value[k] = if attached && s.len() > 1 { min_coface } else { sphere.radius2.min(min_coface) };
    }
    Ok(all.into_iter().zip(value).collect())
}

/// Alpha value of one Delaunay simplex.
pub fn alpha_value(s: &Simplex, pc: &PointCloud) -> Result<f64> {
    let tri = delaunay(pc)?;
    let values = alpha_squared(pc, &tri)?;
    values
        .get(s.vertices())
        .map(|&r2| signed_sqrt(r2))
        .ok_or_else(|| Error::InvalidInput(format!("{s} is not a Delaunay simplex")))
}

/// The alpha filtration, with filtration values equal to (signed) radii.
pub fn build_alpha_filtration(pc: &PointCloud) -> Result<Filtration> {
    let tri = delaunay(pc)?;
    build_from_triangulation(pc, &tri)
}

pub fn build_from_triangulation(pc: &PointCloud, tri: &Triangulation) -> Result<Filtration> {
    let values = alpha_squared(pc, tri)?;
    let raw = values.into_iter().map(|(v, r2)| (Simplex::from_sorted(v), signed_sqrt(r2))).collect();
    canonical_sort(pc.dim(), raw, Some(pc.clone()))
}
