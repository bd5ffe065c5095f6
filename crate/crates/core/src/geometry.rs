//! Point clouds and the small dense linear algebra behind circumspheres and power spheres.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points in ℝ² or ℝ³, stored row-major, with optional weights for power distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    weights: Option<Vec<f64>>,
}

impl PointCloud {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidInput(format!("ambient dimension {dim} is not 2 or 3")));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("point {i} has a non-finite coordinate")));
            }
            coords.extend_from_slice(p);
        }
        if let Some(w) = &weights {
            if w.len() != points.len() {
                return Err(Error::InvalidInput(format!(
                    "{} weights for {} points",
                    w.len(),
                    points.len()
                )));
            }
            if w.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("non-finite weight".into()));
            }
        }
        Ok(PointCloud { dim, coords, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(0.0, |w| w[i])
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Power distance `|x - p_i|² - w_i`.
    pub fn power(&self, i: usize, x: &[f64]) -> f64 {
        dist2(self.point(i), x) - self.weight(i)
    }

    /// Length of the bounding-box diagonal.
    pub fn bbox_diameter(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        dist2(&lo, &hi).sqrt()
    }

    pub fn centroid(&self, ids: &[u32]) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for &v in ids {
            for (ck, pk) in c.iter_mut().zip(self.point(v as usize)) {
                *ck += pk;
            }
        }
        for ck in &mut c {
            *ck /= ids.len() as f64;
        }
        c
    }

    /// Smallest orthogonal sphere of the given vertices (the circumsphere when unweighted).
    pub fn ortho_sphere(&self, ids: &[u32]) -> Option<Sphere> {
        let pts: Vec<&[f64]> = ids.iter().map(|&v| self.point(v as usize)).collect();
        let w: Vec<f64> = ids.iter().map(|&v| self.weight(v as usize)).collect();
        power_sphere(&pts, &w)
    }
}

/// Center and squared radius of a power sphere. `radius2` is negative for some weighted spheres.
#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    pub center: Vec<f64>,
    pub radius2: f64,
}

impl Sphere {
    /// Sign-preserving square root of `radius2`.
    pub fn signed_radius(&self) -> f64 {
        signed_sqrt(self.radius2)
    }
}

/// Sign-preserving square root; both zeros map to `+0.0`.
pub fn signed_sqrt(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    x.signum() * x.abs().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Sphere centered in the affine hull of `pts` with equal power to every point.
/// Returns `None` when the points are affinely dependent.
///
/// Works in an orthonormal frame of the affine hull, so the pivots are simplex heights.
pub fn power_sphere(pts: &[&[f64]], weights: &[f64]) -> Option<Sphere> {
    let p0 = pts[0];
    let k = pts.len() - 1;
    if k == 0 {
        return Some(Sphere { center: p0.to_vec(), radius2: -weights[0] });
    }
    let u: Vec<Vec<f64>> = pts[1..].iter().map(|p| sub(p, p0)).collect();
    let scale = u.iter().map(|x| dot(x, x)).fold(0.0, f64::max).sqrt();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut lower = vec![vec![0.0; k]; k];
    for (j, uj) in u.iter().enumerate() {
        let mut r = uj.clone();
        for _ in 0..2 {
            for e in &basis {
                let c = dot(e, &r);
                r.iter_mut().zip(e).for_each(|(x, y)| *x -= c * y);
            }
        }
        let h = dot(&r, &r).sqrt();
        if h <= 1e-12 * scale {
            return None;
        }
        for (i, e) in basis.iter().enumerate() {
            lower[j][i] = dot(e, uj);
        }
        lower[j][j] = h;
        basis.push(r.into_iter().map(|x| x / h).collect());
    }
    let mut lambda = vec![0.0; k];
    for j in 0..k {
        let rhs = 0.5 * (dot(&u[j], &u[j]) - weights[j + 1] + weights[0]);
        let s: f64 = (0..j).map(|i| lower[j][i] * lambda[i]).sum();
        lambda[j] = (rhs - s) / lower[j][j];
    }
    let mut center = p0.to_vec();
    for (l, e) in lambda.iter().zip(&basis) {
        center.iter_mut().zip(e).for_each(|(c, x)| *c += l * x);
    }
    let radius2 = dist2(&center, p0) - weights[0];
    Some(Sphere { center, radius2 })
}

/// Unit normal of the hyperplane through `n` points in ℝⁿ (n = 2 or 3).
pub fn hyperplane_normal(pts: &[&[f64]]) -> Option<Vec<f64>> {
    let n = match pts.len() {
        2 => {
            let d = sub(pts[1], pts[0]);
            vec![-d[1], d[0]]
        }
        3 => {
            let a = sub(pts[1], pts[0]);
            let b = sub(pts[2], pts[0]);
            vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
        }
        _ => return None,
    };
    let len = dot(&n, &n).sqrt();
    if len == 0.0 {
        return None;
    }
    Some(n.into_iter().map(|x| x / len).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn circumcircle_of_right_triangle() {
        let pts: [&[f64]; 3] = [&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]];
        let s = power_sphere(&pts, &[0.0; 3]).unwrap();
        assert_relative_eq!(s.center[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.center[1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.radius2, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn edge_sphere_in_3d_is_midpoint() {
        let pts: [&[f64]; 2] = [&[0.0, 0.0, 0.0], &[0.0, 0.0, 4.0]];
        let s = power_sphere(&pts, &[0.0; 2]).unwrap();
        assert_relative_eq!(s.center[2], 2.0);
        assert_relative_eq!(s.radius2, 4.0);
    }

    #[test]
    fn weights_shift_the_power_center() {
        let pts: [&[f64]; 2] = [&[0.0, 0.0], &[2.0, 0.0]];
        let s = power_sphere(&pts, &[1.0, 0.0]).unwrap();
        // |c|² - 1 = |c - 2|²  →  c = 1.25
        assert_relative_eq!(s.center[0], 1.25);
        assert_relative_eq!(s.radius2, 1.25 * 1.25 - 1.0);
    }

    #[test]
    fn collinear_points_have_no_circumcircle() {
        let pts: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]];
        assert!(power_sphere(&pts, &[0.0; 3]).is_none());
    }

    #[test]
    fn tetrahedron_circumsphere() {
        let pts: [&[f64]; 4] = [&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[-1.0, 0.0, 0.0]];
        let s = power_sphere(&pts, &[0.0; 4]).unwrap();
        for p in pts {
            assert_relative_eq!(dist2(&s.center, p), s.radius2, epsilon = 1e-12);
        }
    }

    #[test]
    fn signed_sqrt_keeps_sign() {
        assert_eq!(signed_sqrt(-4.0), -2.0);
        assert_eq!(signed_sqrt(9.0), 3.0);
    }
}
