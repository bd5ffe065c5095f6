//! Optimal volumes, children pairs and optimal cycles.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::complex::{Chain, Filtration, Z2};
use crate::error::{Error, Result};
use crate::geometry::{dist2, power_sphere};
use crate::lp::{minimize_l1, L1Column, L1Problem, LpSolution, LpStatus, SUPPORT_THRESHOLD};
use crate::persistence::{check_pair, PersistencePair, ReducedMatrices};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    Unbounded,
    Ball(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeOptions {
    /// Starting locality radius. Defaults to twice the circumradius of the death simplex.
    pub radius: Option<f64>,
    /// Margin for the retries that force a nonzero birth coefficient.
    pub epsilon: f64,
    pub support_threshold: f64,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        VolumeOptions { radius: None, epsilon: 1.0, support_threshold: SUPPORT_THRESHOLD }
    }
}

/// The ℓ¹ problem for one pair plus the bookkeeping to read its solution back.
#[derive(Debug, Clone)]
pub struct VolumeLp {
    pub problem: L1Problem,
    /// LP column → (q+1)-simplex index.
    pub legend: Vec<usize>,
    /// LP row → q-simplex index.
    pub row_simplices: Vec<usize>,
    /// Coefficients of `σ_b*(∂z)` on the LP columns, and its constant part from `∂σ_d`.
    pub birth_terms: Vec<(usize, f64)>,
    pub birth_constant: f64,
}

impl VolumeLp {
    /// `σ_b*(∂z)` for a column assignment.
    pub fn birth_coefficient(&self, x: &[f64]) -> f64 {
        self.birth_constant + self.birth_terms.iter().map(|&(j, c)| c * x[j]).sum::<f64>()
    }

    fn with_birth_bound(&self, epsilon: f64) -> L1Problem {
        let mut p = self.problem.clone();
        let slack = p.columns.len();
        p.columns.push(L1Column::NonNegative);
        let mut row = self.birth_terms.clone();
        row.push((slack, -epsilon.signum()));
        p.rows.push(row);
        p.rhs.push(epsilon - self.birth_constant);
        p
    }
}

fn finite_death(pair: &PersistencePair) -> Result<usize> {
    pair.death_index.ok_or_else(|| {
        Error::Unsupported(format!(
            "pair born at {} never dies: it bounds no volume, so we cannot define the volume optimal cycle",
            pair.birth_index + 1
        ))
    })
}

fn inside_ball(f: &Filtration, k: usize, center: &[f64], r2: f64) -> bool {
    let pc = f.points().expect("checked by caller");
    f.vertices(k).iter().all(|&v| dist2(pc.point(v as usize), center) <= r2)
}

/// Variables are the (q+1)-simplices strictly between birth and death (inside the ball);
/// rows are the q-simplices strictly between birth and death touched by them or by `σ_d`.
pub fn assemble_volume_lp(f: &Filtration, pair: &PersistencePair, radius: Radius) -> Result<VolumeLp> {
    let d = finite_death(pair)?;
    let b = pair.birth_index;
    let q = pair.degree;
    let ball = match radius {
        Radius::Unbounded => None,
        Radius::Ball(r) => {
            let pc = f.points().ok_or_else(|| Error::InvalidInput("a locality radius needs vertex coordinates".into()))?;
            Some((pc.centroid(f.vertices(d)), (r * (1.0 + 1e-12)).powi(2)))
        }
    };
    let legend: Vec<usize> = (b + 1..d)
        .filter(|&k| f.dim(k) == q + 1)
        .filter(|&k| ball.as_ref().is_none_or(|(c, r2)| inside_ball(f, k, c, *r2)))
        .collect();
    let mut row_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut row_simplices = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut rhs = Vec::new();
    let mut row_for = |t: usize, rows: &mut Vec<Vec<(usize, f64)>>, rhs: &mut Vec<f64>| -> usize {
        *row_of.entry(t).or_insert_with(|| {
            row_simplices.push(t);
            rows.push(Vec::new());
            rhs.push(0.0);
            rows.len() - 1
        })
    };
    let mut birth_constant = 0.0;
    for (t, s) in f.facet_indices(d) {
        if t > b {
            let r = row_for(t, &mut rows, &mut rhs);
            rhs[r] -= s as f64;
        } else if t == b {
            birth_constant += s as f64;
        }
    }
    let mut birth_terms = Vec::new();
    for (col, &k) in legend.iter().enumerate() {
        for (t, s) in f.facet_indices(k) {
            if t > b {
                let r = row_for(t, &mut rows, &mut rhs);
                rows[r].push((col, s as f64));
            } else if t == b {
                birth_terms.push((col, s as f64));
            }
        }
    }
    Ok(VolumeLp {
        problem: L1Problem { rows, rhs, columns: vec![L1Column::Penalized; legend.len()], constant: 1.0 },
        legend,
        row_simplices,
        birth_terms,
        birth_constant,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeDiagnostics {
    pub objective: f64,
    pub lp_iterations: usize,
    pub lp_variables: usize,
    pub lp_constraints: usize,
    pub radius_attempts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalVolume {
    pub pair: PersistencePair,
    /// Degree q+1 chain containing the death simplex with coefficient 1.
    pub volume: Chain<f64>,
    /// Boundary of `volume`.
    pub cycle: Chain<f64>,
    pub children: Vec<PersistencePair>,
    /// `None` when the whole complex was used.
    pub radius_used: Option<f64>,
    pub retried_with_epsilon: bool,
    pub diagnostics: VolumeDiagnostics,
}

struct Attempt {
    lp: VolumeLp,
    sol: LpSolution,
    retried: bool,
    iterations: usize,
}

fn solve_attempt(f: &Filtration, pair: &PersistencePair, radius: Radius, opts: &VolumeOptions) -> Result<Option<Attempt>> {
    let lp = assemble_volume_lp(f, pair, radius)?;
    let numerical = |s: &LpSolution| Error::Numerical {
        status: s.status.to_string(),
        context: format!("volume of pair ({}, {})", pair.birth_index + 1, pair.death_index.unwrap_or(0) + 1),
    };
    let sol = minimize_l1(&lp.problem)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Ok(None),
        _ => return Err(numerical(&sol)),
    }
    let mut iterations = sol.iterations;
    if lp.birth_coefficient(&sol.x).abs() > opts.support_threshold {
        return Ok(Some(Attempt { lp, sol, retried: false, iterations }));
    }
    log::debug!("birth coefficient vanished; retrying with ±{}", opts.epsilon);
    let mut best: Option<LpSolution> = None;
    for eps in [opts.epsilon, -opts.epsilon] {
        let s = minimize_l1(&lp.with_birth_bound(eps))?;
        iterations += s.iterations;
        match s.status {
            LpStatus::Optimal => {
                if best.as_ref().is_none_or(|b| s.objective < b.objective - 1e-9) {
                    best = Some(s);
                }
            }
            LpStatus::Infeasible => {}
            _ => return Err(numerical(&s)),
        }
    }
    Ok(best.map(|mut sol| {
        sol.x.truncate(lp.legend.len());
        Attempt { lp, sol, retried: true, iterations }
    }))
}

fn circumradius(f: &Filtration, k: usize) -> f64 {
    let pc = f.points().expect("checked by caller");
    let pts: Vec<&[f64]> = f.vertices(k).iter().map(|&v| pc.point(v as usize)).collect();
    match power_sphere(&pts, &vec![0.0; pts.len()]) {
        Some(s) => s.radius2.max(0.0).sqrt(),
        None => {
            let c = pc.centroid(f.vertices(k));
            pts.iter().map(|p| dist2(p, &c)).fold(0.0, f64::max).sqrt()
        }
    }
}

/// Solves for an optimal volume of a finite pair, growing the locality ball on infeasibility.
pub fn optimal_volume(
    f: &Filtration,
    pair: &PersistencePair,
    full_diagram: &[PersistencePair],
    opts: &VolumeOptions,
) -> Result<OptimalVolume> {
    let d = finite_death(pair)?;
    let mut radii: Vec<Radius> = Vec::new();
    match (f.points(), opts.radius) {
        (None, Some(_)) => return Err(Error::InvalidInput("a locality radius needs vertex coordinates".into())),
        (None, None) => {}
        (Some(pc), r) => {
            let cap = pc.bbox_diameter();
            let mut r = r.unwrap_or_else(|| 2.0 * circumradius(f, d));
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidInput(format!("radius {r} is not positive")));
            }
            while r <= cap {
                radii.push(Radius::Ball(r));
                r *= 2.0;
            }
        }
    }
    radii.push(Radius::Unbounded);
    let mut total_iterations = 0;
    for (attempt_no, &radius) in radii.iter().enumerate() {
        let Some(a) = solve_attempt(f, pair, radius, opts)? else {
            log::debug!("pair ({}, {}) infeasible at {radius:?}", pair.birth_index + 1, d + 1);
            continue;
        };
        total_iterations += a.iterations;
        let mut volume = Chain::new(pair.degree + 1);
        volume.add_term(d, 1.0);
        for (&k, &x) in a.lp.legend.iter().zip(&a.sol.x) {
            if x.abs() > opts.support_threshold {
                volume.add_term(k, x);
            }
        }
        let cycle = volume.boundary(f).pruned(opts.support_threshold);
        let mut ov = OptimalVolume {
            pair: *pair,
            volume,
            cycle,
            children: Vec::new(),
            radius_used: match radius {
                Radius::Ball(r) => Some(r),
                Radius::Unbounded => None,
            },
            retried_with_epsilon: a.retried,
            diagnostics: VolumeDiagnostics {
                objective: a.sol.objective,
                lp_iterations: total_iterations,
                lp_variables: a.lp.legend.len(),
                lp_constraints: a.lp.row_simplices.len(),
                radius_attempts: attempt_no + 1,
            },
        };
        ov.children = children_pairs(f, &ov, full_diagram);
        return Ok(ov);
    }
    Err(Error::Internal(format!(
        "no persistent volume for finite pair ({}, {}) even on the whole complex",
        pair.birth_index + 1,
        d + 1
    )))
}

/// Other pairs of the same degree whose death simplex is in the volume, by birth index.
pub fn children_pairs(_f: &Filtration, ov: &OptimalVolume, full_diagram: &[PersistencePair]) -> Vec<PersistencePair> {
    let mut out: Vec<PersistencePair> = full_diagram
        .iter()
        .filter(|p| p.degree == ov.pair.degree && p.indices() != ov.pair.indices())
        .filter(|p| p.death_index.is_some_and(|d| ov.volume.contains(d)))
        .copied()
        .collect();
    out.sort_by_key(|p| p.birth_index);
    out
}

/// Mod-2 image of a real chain: odd coefficients when integral, otherwise the support.
pub fn z2_image(c: &Chain<f64>) -> Chain<Z2> {
    let integral = c.iter().all(|(_, v)| (v - v.round()).abs() <= 1e-6);
    if integral {
        Chain::from_support(c.degree(), c.iter().filter(|(_, v)| (v.round() as i64) % 2 != 0).map(|(k, _)| k))
    } else {
        c.to_z2()
    }
}

/// Checks the persistent-volume conditions and that the boundary is a persistence cycle.
pub fn check_persistent_volume(f: &Filtration, rm: &ReducedMatrices, pair: &PersistencePair, z: &Chain<f64>) -> bool {
    let Some(d) = pair.death_index else { return false };
    let b = pair.birth_index;
    let q = pair.degree;
    let thr = SUPPORT_THRESHOLD;
    let z = z.pruned(0.0);
    if (z.get(d) - 1.0).abs() > 1e-9 {
        return false;
    }
    if z.iter().any(|(k, _)| k <= b || k > d || f.dim(k) != q + 1) {
        return false;
    }
    let bd = z.boundary(f);
    if bd.iter().any(|(t, c)| t > b && t < d && c.abs() > thr) {
        return false;
    }
    if bd.get(b).abs() <= thr {
        return false;
    }
    rm.check_cycle_conditions(f, pair, &z2_image(&bd.pruned(thr)))
}

/// Real cycle with the same support as a Z₂ cycle, or an error when no ±1 signing exists.
pub fn lift_cycle(f: &Filtration, z: &Chain<Z2>) -> Result<Chain<f64>> {
    let q = z.degree();
    let support = z.support();
    let lifted = match q {
        0 => Chain::from_terms(0, support.iter().enumerate().map(|(i, &k)| (k, if i % 2 == 0 { 1.0 } else { -1.0 }))),
        1 => orient_edges(f, &support),
        _ => propagate_signs(f, q, &support),
    };
    if q > 0 && !lifted.boundary(f).is_empty() {
        return Err(Error::Unsupported(format!("degree-{q} cycle with {} simplices has no real lift", support.len())));
    }
    Ok(lifted)
}

fn orient_edges(f: &Filtration, edges: &[usize]) -> Chain<f64> {
    let mut adj: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, &e) in edges.iter().enumerate() {
        for &v in f.vertices(e) {
            adj.entry(v).or_default().push(i);
        }
    }
    let mut used = vec![false; edges.len()];
    let mut out = Chain::new(1);
    let mut starts: Vec<u32> = adj.keys().copied().collect();
    starts.sort_unstable();
    for start in starts {
        let mut v = start;
        while let Some(&i) = adj[&v].iter().find(|&&i| !used[i]) {
            used[i] = true;
            let [a, b] = [f.vertices(edges[i])[0], f.vertices(edges[i])[1]];
            let (sign, next) = if v == a { (1.0, b) } else { (-1.0, a) };
            out.add_term(edges[i], sign);
            v = next;
        }
    }
    out
}

fn propagate_signs(f: &Filtration, q: usize, support: &[usize]) -> Chain<f64> {
    let mut by_face: HashMap<usize, Vec<(usize, i8)>> = HashMap::new();
    for (i, &k) in support.iter().enumerate() {
        for (t, s) in f.facet_indices(k) {
            by_face.entry(t).or_default().push((i, s));
        }
    }
    let mut sign: Vec<i8> = vec![0; support.len()];
    for seed in 0..support.len() {
        if sign[seed] != 0 {
            continue;
        }
        sign[seed] = 1;
        let mut queue = VecDeque::from([seed]);
        while let Some(i) = queue.pop_front() {
            for (t, s) in f.facet_indices(support[i]) {
                let sharing = &by_face[&t];
                if sharing.len() != 2 {
                    continue;
                }
                let (j, sj) = if sharing[0].0 == i { sharing[1] } else { sharing[0] };
                if sign[j] == 0 {
                    sign[j] = -sign[i] * s * sj;
                    queue.push_back(j);
                }
            }
        }
    }
    Chain::from_terms(q, support.iter().zip(&sign).map(|(&k, &s)| (k, s as f64)))
}

/// Shortest cycle (in ℓ¹) homologous in `X_b` to the pair's persistence cycle modulo the
/// persistence cycles of pairs alive at the birth time.
pub fn optimal_cycle(f: &Filtration, rm: &ReducedMatrices, pair: &PersistencePair) -> Result<Chain<f64>> {
    check_pair(rm, f, pair)?;
    let q = pair.degree;
    let b = pair.birth_index;
    let zi = lift_cycle(f, &rm.persistence_cycle(pair))?;
    let mut others = Vec::new();
    for p in rm.diagram(f, q) {
        if p.birth_index < b && p.death_index.is_none_or(|d| b < d) {
            others.push(lift_cycle(f, &rm.persistence_cycle(&p))?);
        }
    }
    let zs: Vec<usize> = (0..=b).filter(|&k| f.dim(k) == q).collect();
    let row_of: HashMap<usize, usize> = zs.iter().enumerate().map(|(r, &k)| (k, r)).collect();
    let ws: Vec<usize> = (0..=b).filter(|&k| f.dim(k) == q + 1).collect();
    let mut rows: Vec<Vec<(usize, f64)>> = (0..zs.len()).map(|r| vec![(r, 1.0)]).collect();
    let mut columns = vec![L1Column::Penalized; zs.len()];
    for &w in &ws {
        let col = columns.len();
        columns.push(L1Column::Free);
        for (t, s) in f.facet_indices(w) {
            rows[row_of[&t]].push((col, -(s as f64)));
        }
    }
    for zj in &others {
        let col = columns.len();
        columns.push(L1Column::Free);
        for (t, c) in zj.iter() {
            rows[row_of[&t]].push((col, -c));
        }
    }
    let mut rhs = vec![0.0; zs.len()];
    for (t, c) in zi.iter() {
        rhs[row_of[&t]] = c;
    }
    let sol = minimize_l1(&L1Problem { rows, rhs, columns, constant: 0.0 })?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Numerical { status: sol.status.to_string(), context: "optimal cycle".into() });
    }
    Ok(Chain::from_terms(q, zs.iter().zip(&sol.x).map(|(&k, &x)| (k, x))).pruned(SUPPORT_THRESHOLD))
}

/// OFF mesh of the given simplices: triangles as faces, tetrahedra as their four triangles,
/// edges as two-vertex faces. Planar points get a zero third coordinate.
pub fn to_off(f: &Filtration, simplices: &[usize]) -> Result<String> {
    let pc = f.points().ok_or_else(|| Error::InvalidInput("mesh export needs vertex coordinates".into()))?;
    let mut faces: Vec<Vec<u32>> = Vec::new();
    for &k in simplices {
        let v = f.vertices(k);
        match v.len() {
            2 | 3 => faces.push(v.to_vec()),
            4 => {
                for skip in 0..4 {
                    faces.push(v.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &x)| x).collect());
                }
            }
            _ => {}
        }
    }
    let mut ids: Vec<u32> = faces.iter().flatten().copied().collect();
    ids.sort_unstable();
    ids.dedup();
    let local: HashMap<u32, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out = format!("OFF\n{} {} 0\n", ids.len(), faces.len());
    for &v in &ids {
        let p = pc.point(v as usize);
        let z = p.get(2).copied().unwrap_or(0.0);
        out.push_str(&format!("{} {} {}\n", p[0], p[1], z));
    }
    for face in &faces {
        out.push_str(&face.len().to_string());
        for v in face {
            out.push_str(&format!(" {}", local[v]));
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::persistence::reduce;

    #[test]
    fn filled_triangle_volume_is_the_triangle() {
        let f = fixtures::filled_triangle();
        let rm = reduce(&f);
        let pair = rm.pair_by_death(&f, 6).unwrap();
        let lp = assemble_volume_lp(&f, &pair, Radius::Unbounded).unwrap();
        assert!(lp.legend.is_empty());
        let ov = optimal_volume(&f, &pair, &rm.pairs(&f), &VolumeOptions::default()).unwrap();
        assert_eq!(ov.volume.support(), vec![6]);
        assert_eq!(ov.cycle.support(), vec![3, 4, 5]);
        assert!(ov.children.is_empty());
        assert!(!ov.retried_with_epsilon);
        assert!(check_persistent_volume(&f, &rm, &pair, &ov.volume));
    }

    #[test]
    fn essential_pair_is_unsupported() {
        let f = fixtures::hollow_square();
        let rm = reduce(&f);
        let pair = rm.diagram(&f, 1)[0];
        let err = optimal_volume(&f, &pair, &[], &VolumeOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
        assert!(assemble_volume_lp(&f, &pair, Radius::Unbounded).is_err());
    }

    #[test]
    fn zero_death_coefficient_is_rejected() {
        let f = fixtures::filled_triangle();
        let rm = reduce(&f);
        let pair = rm.pair_by_death(&f, 6).unwrap();
        assert!(!check_persistent_volume(&f, &rm, &pair, &Chain::new(2)));
    }

    #[test]
    fn square_with_diagonal_later_triangle() {
        let f = fixtures::square_with_diagonal();
        let rm = reduce(&f);
        let pairs = rm.diagram(&f, 1);
        let last = pairs.iter().find(|p| p.death_index == Some(f.len() - 1)).unwrap();
        let ov = optimal_volume(&f, last, &pairs, &VolumeOptions::default()).unwrap();
        assert_eq!(ov.volume.support(), vec![f.len() - 1]);
    }

    #[test]
    fn hollow_square_optimal_cycle_is_the_loop() {
        let f = fixtures::hollow_square();
        let rm = reduce(&f);
        let z = optimal_cycle(&f, &rm, &rm.diagram(&f, 1)[0]).unwrap();
        assert_eq!(z.support(), vec![4, 5, 6, 7]);
    }

    #[test]
    fn filled_triangle_optimal_cycle() {
        let f = fixtures::filled_triangle();
        let rm = reduce(&f);
        let z = optimal_cycle(&f, &rm, &rm.pair_by_death(&f, 6).unwrap()).unwrap();
        assert_eq!(z.support(), vec![3, 4, 5]);
        assert!(z.iter().all(|(_, c)| c.abs() == 1.0));
    }

    #[test]
    fn lifted_edge_cycle_has_zero_boundary() {
        let f = fixtures::hollow_square();
        let z = Chain::from_support(1, [4, 5, 6, 7]);
        let lifted = lift_cycle(&f, &z).unwrap();
        assert!(lifted.boundary(&f).is_empty());
        assert_eq!(lifted.len(), 4);
    }

    #[test]
    fn off_export_of_triangle() {
        let f = fixtures::filled_triangle();
        assert!(to_off(&f, &[6]).is_err());
    }
}
