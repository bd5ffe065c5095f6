//! Seeded point-cloud and filtration generators for tests and benchmarks.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::Filtration;
use crate::error::Result;
use crate::geometry::PointCloud;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform points in the unit square or cube.
pub fn uniform_cloud(n: usize, dim: usize, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    let pts = (0..n).map(|_| (0..dim).map(|_| r.gen::<f64>()).collect()).collect();
    PointCloud::new(dim, pts, None).expect("valid cloud")
}

/// Points on a circle with uniform radial noise.
pub fn circle_cloud(n: usize, radius: f64, noise: f64, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    let pts = (0..n)
        .map(|_| {
            let t = r.gen::<f64>() * TAU;
            let rr = radius + noise * (2.0 * r.gen::<f64>() - 1.0);
            vec![rr * t.cos(), rr * t.sin()]
        })
        .collect();
    PointCloud::new(2, pts, None).expect("valid cloud")
}

/// Points distributed uniformly by area on the torus with tube radius `r` around a circle of radius `big_r`.
pub fn torus_cloud(n: usize, big_r: f64, r: f64, seed: u64) -> PointCloud {
    let mut g = rng(seed);
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let u = g.gen::<f64>() * TAU;
        let v = g.gen::<f64>() * TAU;
        if g.gen::<f64>() * (big_r + r) > big_r + r * v.cos() {
            continue;
        }
        let w = big_r + r * v.cos();
        pts.push(vec![w * u.cos(), w * u.sin(), r * v.sin()]);
    }
    PointCloud::new(3, pts, None).expect("valid cloud")
}

/// Face-centred cubic lattice points in `[0, cells]³` with uniform jitter of half-width `jitter`.
pub fn fcc_cloud(cells: usize, jitter: f64, seed: u64) -> PointCloud {
    let mut g = rng(seed);
    let mut pts = Vec::new();
    let n = 2 * cells;
    for i in 0..=n {
        for j in 0..=n {
            for k in 0..=n {
                if (i + j + k) % 2 == 0 {
                    pts.push(
                        [i, j, k].iter().map(|&x| x as f64 / 2.0 + jitter * (2.0 * g.gen::<f64>() - 1.0)).collect(),
                    );
                }
            }
        }
    }
    PointCloud::new(3, pts, None).expect("valid cloud")
}

/// A planar strip of `2m` triangles with random filtration values, canonically sorted.
///
/// Square `i` has corners `2i, 2i+2` (bottom) and `2i+1, 2i+3` (top), split along `2i+2 – 2i+1`.
pub fn triangle_strip(m: usize, seed: u64) -> Result<Filtration> {
    let mut g = rng(seed);
    let nv = 2 * m + 2;
    let mut simplices: Vec<([u32; 3], u8, f64)> = Vec::with_capacity(nv + 6 * m + 1);
    for v in 0..nv as u32 {
        simplices.push(([v, 0, 0], 0, 0.0));
    }
    let edge = |a: u32, b: u32, list: &mut Vec<([u32; 3], u8, f64)>, g: &mut ChaCha8Rng| -> f64 {
        let x = g.gen::<f64>();
        list.push(([a.min(b), a.max(b), 0], 1, x));
        x
    };
    let first_rung = edge(0, 1, &mut simplices, &mut g);
    let mut left_rung = first_rung;
    for i in 0..m as u32 {
        let (b0, t0, b1, t1) = (2 * i, 2 * i + 1, 2 * i + 2, 2 * i + 3);
        let bottom = edge(b0, b1, &mut simplices, &mut g);
        let top = edge(t0, t1, &mut simplices, &mut g);
        let diag = edge(t0, b1, &mut simplices, &mut g);
        let right = edge(b1, t1, &mut simplices, &mut g);
        let lower = left_rung.max(bottom).max(diag) + g.gen::<f64>();
        let upper = right.max(top).max(diag) + g.gen::<f64>();
        simplices.push(([b0, t0, b1], 2, lower));
        simplices.push(([t0, b1, t1], 2, upper));
        left_rung = right;
    }
    simplices.sort_unstable_by(|a, b| a.2.total_cmp(&b.2).then(a.1.cmp(&b.1)).then(a.0.cmp(&b.0)));
    let mut verts = Vec::with_capacity(nv + 2 * (4 * m + 1) + 6 * m);
    let mut offsets = Vec::with_capacity(simplices.len() + 1);
    let mut values = Vec::with_capacity(simplices.len());
    offsets.push(0);
    for (v, d, x) in &simplices {
        verts.extend_from_slice(&v[..=*d as usize]);
        offsets.push(verts.len());
        values.push(*x);
    }
    let coords = (0..nv).map(|v| vec![(v / 2) as f64, (v % 2) as f64]).collect();
    let points = PointCloud::new(2, coords, None)?;
    Ok(Filtration::from_flat(2, verts, offsets, values, Some(points)))
}
