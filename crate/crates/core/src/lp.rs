//! Dense two-phase primal simplex with Bland's rule, and an ℓ¹ front end.
//!
//! Constraints are stored sparsely. A presolve pass removes empty rows and fixes variables
//! pinned by singleton rows; only the remainder is put into a dense tableau.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-12;
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Coefficients at or below this magnitude are treated as zero in LP solutions.
pub const SUPPORT_THRESHOLD: f64 = 1e-7;
const COST_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    NonNegative,
    Free,
}

/// `minimize c·x  subject to  A x = b`, each variable nonnegative or free.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
    pub bounds: Vec<Bound>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, bounds: Vec<Bound>) -> Self {
        LinearProgram { objective, rows: Vec::new(), rhs: Vec::new(), bounds }
    }

    /// Builds from a dense constraint matrix; zero entries are dropped.
    pub fn dense(objective: Vec<f64>, a: &[Vec<f64>], b: Vec<f64>, bounds: Vec<Bound>) -> Self {
        let rows = a
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect())
            .collect();
        LinearProgram { objective, rows, rhs: b, bounds }
    }

    pub fn add_row(&mut self, row: Vec<(usize, f64)>, rhs: f64) {
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n || self.rhs.len() != self.rows.len() {
            return Err(Error::InvalidInput("linear program has inconsistent dimensions".into()));
        }
        let finite = self.objective.iter().chain(&self.rhs).all(|v| v.is_finite())
            && self.rows.iter().flatten().all(|(j, v)| *j < n && v.is_finite());
        if !finite {
            return Err(Error::InvalidInput("linear program has a non-finite entry or bad column".into()));
        }
        Ok(())
    }

    /// `‖A x − b‖∞`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| (row.iter().map(|(j, v)| v * x[*j]).sum::<f64>() - b).abs())
            .fold(0.0, f64::max)
    }

    fn residual_bound(&self) -> f64 {
        FEASIBILITY_TOL * (1.0 + self.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

impl std::fmt::Display for LpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::NumericalFailure => "numerical failure",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    fn failed(status: LpStatus, n: usize, iterations: usize) -> Self {
        LpSolution { status, x: vec![0.0; n], objective: f64::NAN, iterations }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

struct Presolved {
    fixed: Vec<Option<f64>>,
    active: Vec<bool>,
    rhs: Vec<f64>,
}

/// Removes empty rows and fixes variables determined by singleton rows, until nothing changes.
fn presolve(rows: &[Vec<(usize, f64)>], rhs: &[f64], nonneg: &[bool], tol: f64) -> Option<Presolved> {
    let n = nonneg.len();
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut live: Vec<usize> = vec![0; rows.len()];
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            if v != 0.0 {
                col_rows[j].push(i);
                live[i] += 1;
            }
        }
    }
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    let mut active = vec![true; rows.len()];
    let mut rhs = rhs.to_vec();
    let mut queue: VecDeque<usize> = (0..rows.len()).filter(|&i| live[i] <= 1).collect();
    while let Some(i) = queue.pop_front() {
        if !active[i] || live[i] > 1 {
            continue;
        }
        active[i] = false;
        if live[i] == 0 {
            if rhs[i].abs() > tol {
                return None;
            }
            continue;
        }
        let (j, a) = rows[i].iter().copied().find(|&(j, v)| v != 0.0 && fixed[j].is_none()).expect("live entry");
        let mut x = rhs[i] / a;
        if nonneg[j] {
            if x < -tol {
                return None;
            }
            x = x.max(0.0);
        }
        fixed[j] = Some(x);
        for &r in &col_rows[j] {
            if !active[r] {
                continue;
            }
            let coef: f64 = rows[r].iter().filter(|(c, _)| *c == j).map(|(_, v)| v).sum();
            rhs[r] -= coef * x;
            live[r] -= 1;
            if live[r] <= 1 {
                queue.push_back(r);
            }
        }
    }
    Some(Presolved { fixed, active, rhs })
}

struct Tableau {
    m: usize,
    width: usize,
    t: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    iterations: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Stalled,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.width + self.width - 1]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.t[pr * w + pc];
        let mut nz: Vec<usize> = Vec::new();
        for c in 0..w {
            let v = &mut self.t[pr * w + c];
            if *v != 0.0 {
                *v /= p;
                nz.push(c);
            }
        }
        self.t[pr * w + pc] = 1.0;
        let prow: Vec<(usize, f64)> = nz.iter().map(|&c| (c, self.t[pr * w + c])).collect();
        for r in 0..self.m {
            if r == pr {
                continue;
            }
            let f = self.t[r * w + pc];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[r * w..(r + 1) * w];
            for &(c, v) in &prow {
                let x = row[c] - f * v;
                row[c] = if x.abs() < DROP_TOL { 0.0 } else { x };
            }
            row[pc] = 0.0;
        }
        let f = self.cost[pc];
        if f != 0.0 {
            for &(c, v) in &prow {
                let x = self.cost[c] - f * v;
                self.cost[c] = if x.abs() < DROP_TOL { 0.0 } else { x };
            }
            self.cost[pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.iterations += 1;
    }

    /// Runs Bland-rule pivots with entering columns restricted to `0..allowed`.
    fn run(&mut self, allowed: usize, max_iter: usize) -> Step {
        loop {
            if self.iterations >= max_iter {
                return Step::Stalled;
            }
            let Some(pc) = (0..allowed).find(|&j| self.cost[j] < -COST_TOL) else {
                return Step::Optimal;
            };
            let mut best: Option<(f64, usize)> = None;
            for i in 0..self.m {
                let a = self.at(i, pc);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                best = match best {
                    None => Some((ratio, i)),
                    Some((r, bi)) => {
                        let tie = (ratio - r).abs() <= 1e-12 * (1.0 + r.abs());
                        if (tie && self.basis[i] < self.basis[bi]) || (!tie && ratio < r) {
                            Some((ratio, i))
                        } else {
                            Some((r, bi))
                        }
                    }
                };
            }
            match best {
                None => return Step::Unbounded,
                Some((_, pr)) => self.pivot(pr, pc),
            }
        }
    }
}

/// Solves a standard-form problem `min c·x, A x = b, x ≥ 0` (dense rows) by two-phase simplex.
fn simplex(c: &[f64], a: &[Vec<f64>], b: &[f64], tol: f64) -> (LpStatus, Vec<f64>, usize) {
    let m = a.len();
    let n = c.len();
    let width = n + m + 1;
    let mut t = vec![0.0; m * width];
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * width + j] = s * a[i][j];
        }
        t[i * width + n + i] = 1.0;
        t[i * width + width - 1] = s * b[i];
    }
    let mut cost = vec![0.0; width];
    for i in 0..m {
        for j in 0..n {
            cost[j] -= t[i * width + j];
        }
        cost[width - 1] -= t[i * width + width - 1];
    }
    let mut tab = Tableau { m, width, t, cost, basis: (n..n + m).collect(), iterations: 0 };
    let max_iter = 50 * (m + n) + 1000;
    match tab.run(n, max_iter) {
        Step::Optimal => {}
        Step::Unbounded | Step::Stalled => return (LpStatus::NumericalFailure, vec![0.0; n], tab.iterations),
    }
    if -tab.cost[width - 1] > tol {
        return (LpStatus::Infeasible, vec![0.0; n], tab.iterations);
    }
    for i in 0..m {
        if tab.basis[i] < n {
            continue;
        }
        let best = (0..n)
            .filter(|&j| tab.at(i, j).abs() > 1e-9)
            .max_by(|&x, &y| tab.at(i, x).abs().total_cmp(&tab.at(i, y).abs()));
        if let Some(j) = best {
            tab.pivot(i, j);
        }
    }
    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(c);
    for i in 0..m {
        let bj = tab.basis[i];
        if bj < n && c[bj] != 0.0 {
            let cb = c[bj];
            for j in 0..width {
                cost[j] -= cb * tab.at(i, j);
            }
        }
    }
    tab.cost = cost;
    let status = match tab.run(n, max_iter) {
        Step::Optimal => LpStatus::Optimal,
        Step::Unbounded => LpStatus::Unbounded,
        Step::Stalled => LpStatus::NumericalFailure,
    };
    let mut x = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs(i).max(0.0);
        }
    }
    (status, x, tab.iterations)
}

/// Solves the program. Optimal solutions are vertices of the feasible region.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.check()?;
    let n = lp.num_vars();
    let tol = lp.residual_bound();
    let nonneg: Vec<bool> = lp.bounds.iter().map(|b| *b == Bound::NonNegative).collect();
    let Some(pre) = presolve(&lp.rows, &lp.rhs, &nonneg, tol) else {
        return Ok(LpSolution::failed(LpStatus::Infeasible, n, 0));
    };

    let mut in_active = vec![false; n];
    for (i, row) in lp.rows.iter().enumerate() {
        if pre.active[i] {
            for &(j, v) in row {
                if v != 0.0 && pre.fixed[j].is_none() {
                    in_active[j] = true;
                }
            }
        }
    }
    let mut unbounded_ray = false;
    let mut x = vec![0.0; n];
    // Split columns: each remaining variable maps to one or two standard-form columns.
    let mut col_of: Vec<Option<(usize, Option<usize>)>> = vec![None; n];
    let mut c_std = Vec::new();
    for j in 0..n {
        if let Some(v) = pre.fixed[j] {
            x[j] = v;
            continue;
        }
        if !in_active[j] {
            let cj = lp.objective[j];
            if cj < 0.0 || (cj > 0.0 && lp.bounds[j] == Bound::Free) {
                unbounded_ray = true;
            }
            continue;
        }
        let pos = c_std.len();
        c_std.push(lp.objective[j]);
        let neg = if lp.bounds[j] == Bound::Free {
            c_std.push(-lp.objective[j]);
            Some(pos + 1)
        } else {
            None
        };
        col_of[j] = Some((pos, neg));
    }
    let active_rows: Vec<usize> = (0..lp.num_rows()).filter(|&i| pre.active[i]).collect();
    let mut a_std = vec![vec![0.0; c_std.len()]; active_rows.len()];
    let mut b_std = Vec::with_capacity(active_rows.len());
    for (r, &i) in active_rows.iter().enumerate() {
        for &(j, v) in &lp.rows[i] {
            if let Some((pos, neg)) = col_of[j] {
                a_std[r][pos] += v;
                if let Some(neg) = neg {
                    a_std[r][neg] -= v;
                }
            }
        }
        b_std.push(pre.rhs[i]);
    }
    let (status, y, iterations) = simplex(&c_std, &a_std, &b_std, tol);
    if status != LpStatus::Optimal {
        return Ok(LpSolution::failed(status, n, iterations));
    }
    if unbounded_ray {
        return Ok(LpSolution::failed(LpStatus::Unbounded, n, iterations));
    }
    for j in 0..n {
        if let Some((pos, neg)) = col_of[j] {
            x[j] = y[pos] - neg.map_or(0.0, |k| y[k]);
        }
    }
    if lp.residual(&x) > tol {
        return Ok(LpSolution::failed(LpStatus::NumericalFailure, n, iterations));
    }
    let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { status: LpStatus::Optimal, x, objective, iterations })
}

/// Role of a variable in an ℓ¹ problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L1Column {
    /// Free in sign, contributes `|x|` to the objective.
    Penalized,
    /// Free in sign, no cost.
    Free,
    /// Nonnegative, no cost.
    NonNegative,
}

/// `minimize Σ |x_j| over penalized columns + constant  subject to  A x = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Problem {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
    pub columns: Vec<L1Column>,
    pub constant: f64,
}

/// Splits penalized variables into positive and negative parts and solves.
pub fn minimize_l1(p: &L1Problem) -> Result<LpSolution> {
    let n = p.columns.len();
    if p.rhs.len() != p.rows.len() || p.rows.iter().flatten().any(|(j, v)| *j >= n || !v.is_finite()) {
        return Err(Error::InvalidInput("ℓ¹ problem has inconsistent dimensions".into()));
    }
    let tol = FEASIBILITY_TOL * (1.0 + p.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let nonneg: Vec<bool> = p.columns.iter().map(|c| *c == L1Column::NonNegative).collect();
    let Some(pre) = presolve(&p.rows, &p.rhs, &nonneg, tol) else {
        return Ok(LpSolution::failed(LpStatus::Infeasible, n, 0));
    };
    let mut map: Vec<Option<(usize, Option<usize>)>> = vec![None; n];
    let mut objective = Vec::new();
    let mut bounds = Vec::new();
    for j in 0..n {
        if pre.fixed[j].is_some() {
            continue;
        }
        let pos = objective.len();
        match p.columns[j] {
            L1Column::Penalized => {
                objective.extend([1.0, 1.0]);
                bounds.extend([Bound::NonNegative, Bound::NonNegative]);
                map[j] = Some((pos, Some(pos + 1)));
            }
            L1Column::Free => {
                objective.push(0.0);
                bounds.push(Bound::Free);
                map[j] = Some((pos, None));
            }
            L1Column::NonNegative => {
                objective.push(0.0);
                bounds.push(Bound::NonNegative);
                map[j] = Some((pos, None));
            }
        }
    }
    let mut lp = LinearProgram::new(objective, bounds);
    for (i, row) in p.rows.iter().enumerate() {
        if !pre.active[i] {
            continue;
        }
        let mut r = Vec::with_capacity(row.len() * 2);
        for &(j, v) in row {
            if let Some((pos, neg)) = map[j] {
                r.push((pos, v));
                if let Some(neg) = neg {
                    r.push((neg, -v));
                }
            }
        }
        lp.add_row(r, pre.rhs[i]);
    }
    let sol = solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(LpSolution::failed(sol.status, n, sol.iterations));
    }
    let mut x = vec![0.0; n];
    for j in 0..n {
        x[j] = match (pre.fixed[j], map[j]) {
            (Some(v), _) => v,
            (None, Some((pos, neg))) => sol.x[pos] - neg.map_or(0.0, |k| sol.x[k]),
            (None, None) => 0.0,
        };
    }
    let residual = p
        .rows
        .iter()
        .zip(&p.rhs)
        .map(|(row, b)| (row.iter().map(|(j, v)| v * x[*j]).sum::<f64>() - b).abs())
        .fold(0.0, f64::max);
    if residual > tol {
        return Ok(LpSolution::failed(LpStatus::NumericalFailure, n, sol.iterations));
    }
    let objective = p.constant
        + x.iter().zip(&p.columns).filter(|(_, c)| **c == L1Column::Penalized).map(|(v, _)| v.abs()).sum::<f64>();
    Ok(LpSolution { status: LpStatus::Optimal, x, objective, iterations: sol.iterations })
}
