//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use pervol_core::geometry::{dist2, PointCloud};
use pervol_core::synthetic::uniform_cloud;
use pervol_core::{build_alpha_filtration, Filtration, PersistencePair};

/// Seeded random alpha filtrations: `count` clouds with sizes drawn from `sizes`.
pub fn random_alpha(dim: usize, count: usize, sizes: std::ops::RangeInclusive<usize>, seed: u64) -> Vec<Filtration> {
    let span = (sizes.end() - sizes.start() + 1) as u64;
    (0..count as u64)
        .map(|i| {
            let s = seed * 1000 + i;
            let n = sizes.start() + (s.wrapping_mul(2654435761) % span) as usize;
            build_alpha_filtration(&uniform_cloud(n, dim, s)).expect("random points are in general position")
        })
        .collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn gauss(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = a.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some((0..k).map(|r| a[r][k] / a[r][r]).collect())
}

/// Unweighted circumsphere by solving the defining linear system directly.
pub fn circumsphere(pts: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let p0 = pts[0];
    let dim = p0.len();
    if pts.len() != dim + 1 {
        return None;
    }
    let rows = pts[1..]
        .iter()
        .map(|p| {
            let mut row: Vec<f64> = (0..dim).map(|i| 2.0 * (p[i] - p0[i])).collect();
            row.push((0..dim).map(|i| p[i] * p[i] - p0[i] * p0[i]).sum());
            row
        })
        .collect();
    let c = gauss(rows)?;
    let r2 = dist2(&c, p0);
    Some((c, r2))
}

/// Delaunay top simplices by testing every (d+1)-subset for an empty circumsphere.
pub fn brute_delaunay(pc: &PointCloud) -> BTreeSet<Vec<u32>> {
    let d = pc.dim();
    let mut out = BTreeSet::new();
    for s in subsets(pc.len(), d + 1) {
        let pts: Vec<&[f64]> = s.iter().map(|&i| pc.point(i)).collect();
        let Some((c, r2)) = circumsphere(&pts) else { continue };
        let empty = (0..pc.len()).filter(|i| !s.contains(i)).all(|i| dist2(pc.point(i), &c) > r2 * (1.0 + 1e-9));
        if empty {
            out.insert(s.iter().map(|&i| i as u32).collect());
        }
    }
    out
}

/// Optimum of `min c·x, Ax = b, x ≥ 0` over all basic feasible solutions; `None` if there are none.
pub fn vertex_enumeration(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let n = c.len();
    let mut rows: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &v)| r.iter().copied().chain([v]).collect()).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col].abs() > 1e-10) else { continue };
        rows.swap(rank, piv);
        for r in 0..rows.len() {
            if r != rank {
                let f = rows[r][col] / rows[rank][col];
                for k in 0..=n {
                    rows[r][k] -= f * rows[rank][k];
                }
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|r| r[n].abs() > 1e-9) {
        return None;
    }
    rows.truncate(rank);
    let a: Vec<Vec<f64>> = rows.iter().map(|r| r[..n].to_vec()).collect();
    let b: Vec<f64> = rows.iter().map(|r| r[n]).collect();
    let m = a.len();
    let mut best: Option<f64> = None;
    for basis in subsets(n, m) {
        let sys = (0..m)
            .map(|r| {
                let mut row: Vec<f64> = basis.iter().map(|&j| a[r][j]).collect();
                row.push(b[r]);
                row
            })
            .collect();
        let Some(xb) = gauss(sys) else { continue };
        if xb.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let obj: f64 = basis.iter().zip(&xb).map(|(&j, &v)| c[j] * v).sum();
        best = Some(best.map_or(obj, |o: f64| o.min(obj)));
    }
    best
}

/// Cofaces of simplex `k` by scanning every simplex of the target dimension.
pub fn brute_cofaces(f: &Filtration, k: usize, target_dim: usize) -> Vec<usize> {
    let s = f.vertices(k);
    (0..f.len()).filter(|&j| f.dim(j) == target_dim && s.iter().all(|v| f.vertices(j).contains(v))).collect()
}

/// Mod-2 boundary of a set of simplex indices.
pub fn z2_boundary(f: &Filtration, simplices: &[usize]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &k in simplices {
        let v = f.vertices(k);
        for i in 0..v.len() {
            let mut face = v.to_vec();
            face.remove(i);
            let j = f.index_of(&face).expect("face closure");
            if !out.insert(j) {
                out.remove(&j);
            }
        }
    }
    out
}

/// Smallest mod-2 persistent volume by exhaustive search over subsets of the (q+1)-simplices
/// strictly between birth and death. `None` if there are more than `limit` candidates.
pub fn min_z2_volume(f: &Filtration, pair: &PersistencePair, limit: usize) -> Option<Vec<usize>> {
    let (b, d) = (pair.birth_index, pair.death_index?);
    let cand: Vec<usize> = (b + 1..d).filter(|&k| f.dim(k) == pair.degree + 1).collect();
    if cand.len() > limit {
        return None;
    }
    let mut best: Option<Vec<usize>> = None;
    for mask in 0u64..(1u64 << cand.len()) {
        let size = mask.count_ones() as usize + 1;
        if best.as_ref().is_some_and(|v| v.len() <= size) {
            continue;
        }
        let mut vol: Vec<usize> = (0..cand.len()).filter(|i| mask >> i & 1 == 1).map(|i| cand[i]).collect();
        vol.push(d);
        let z = z2_boundary(f, &vol);
        if z.contains(&b) && z.iter().all(|&j| j <= b) {
            vol.sort_unstable();
            best = Some(vol);
        }
    }
    best
}

/// Real coefficients on a pure (q+1)-chain whose interior faces cancel, starting from `seed` = 1.
/// `None` if the orientation is inconsistent.
pub fn orient_volume(f: &Filtration, simplices: &[usize], seed: usize) -> Option<BTreeMap<usize, f64>> {
    let mut by_face: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for &k in simplices {
        let v = f.vertices(k);
        for i in 0..v.len() {
            let mut face = v.to_vec();
            face.remove(i);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            by_face.entry(f.index_of(&face)?).or_default().push((k, sign));
        }
    }
    let mut coef: BTreeMap<usize, f64> = BTreeMap::from([(seed, 1.0)]);
    let mut stack = vec![seed];
    while let Some(k) = stack.pop() {
        for list in by_face.values().filter(|l| l.len() == 2 && l.iter().any(|(s, _)| *s == k)) {
            let (me, other) = if list[0].0 == k { (list[0], list[1]) } else { (list[1], list[0]) };
            let want = -coef[&k] * me.1 / other.1;
            match coef.get(&other.0) {
                Some(&c) if (c - want).abs() > 1e-12 => return None,
                Some(_) => {}
                None => {
                    coef.insert(other.0, want);
                    stack.push(other.0);
                }
            }
        }
    }
    (coef.len() == simplices.len()).then_some(coef)
}

/// Real boundary of a chain given as index → coefficient.
pub fn real_boundary(f: &Filtration, chain: &BTreeMap<usize, f64>) -> BTreeMap<usize, f64> {
    let mut out: BTreeMap<usize, f64> = BTreeMap::new();
    for (&k, &c) in chain {
        let v = f.vertices(k);
        for i in 0..v.len() {
            let mut face = v.to_vec();
            face.remove(i);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            *out.entry(f.index_of(&face).expect("face closure")).or_default() += sign * c;
        }
    }
    out.retain(|_, c| c.abs() > 1e-12);
    out
}

/// Percentile by the nearest-rank method.
pub fn percentile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((p / 100.0) * v.len() as f64).ceil().max(1.0) as usize;
    v[rank - 1]
}
