//! Dense two-phase simplex over a generic ordered field.
//!
//! The same pivoting code runs in `f64` (with tolerances) and in exact
//! [`BigRational`] arithmetic (tolerance zero), which the test referees use to
//! re-solve small programs exactly.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Feasibility tolerance for f64 programs.
pub const FEAS_TOL: f64 = 1e-9;
/// Optimality tolerance for f64 programs.
pub const OPT_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-11;
const DEGENERATE_LIMIT: usize = 50;
const MAX_PIVOTS: usize = 100_000;

pub trait LpScalar: Num + Signed + Clone + PartialOrd + Debug {
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Pivot-size tolerance: entries with magnitude at or below it are zero.
    fn pivot_tol() -> Self;
    /// Feasibility tolerance used for phase-one residuals and sign tests.
    fn feas_tol() -> Self;
}

impl LpScalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn pivot_tol() -> Self {
        PIVOT_TOL
    }
    fn feas_tol() -> Self {
        FEAS_TOL
    }
}

impl LpScalar for BigRational {
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn pivot_tol() -> Self {
        BigRational::zero()
    }
    fn feas_tol() -> Self {
        BigRational::zero()
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    Le,
    Eq,
    Ge,
}

/// `{ z : A_le z ≤ b, A_eq z = b, lo ≤ z ≤ hi }`. Missing bounds are infinite.
#[derive(Debug, Clone)]
pub struct Polytope<T = f64> {
    dim: usize,
    rows: Vec<(Vec<T>, RowKind, T)>,
    lower: Vec<Option<T>>,
    upper: Vec<Option<T>>,
}

impl<T: LpScalar> Polytope<T> {
    /// All coordinates start in `[0, ∞)`.
    pub fn new(dim: usize) -> Self {
        Polytope {
            dim,
            rows: Vec::new(),
            lower: vec![Some(T::zero()); dim],
            upper: vec![None; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set_bounds(&mut self, j: usize, lo: Option<T>, hi: Option<T>) -> &mut Self {
        if let (Some(l), Some(h)) = (&lo, &hi) {
            assert!(l <= h, "lower bound above upper bound for coordinate {j}");
        }
        self.lower[j] = lo;
        self.upper[j] = hi;
        self
    }

    pub fn free(&mut self, j: usize) -> &mut Self {
        self.set_bounds(j, None, None)
    }

    pub fn add_le(&mut self, coeffs: Vec<T>, rhs: T) -> &mut Self {
        self.push(coeffs, RowKind::Le, rhs)
    }

    pub fn add_ge(&mut self, coeffs: Vec<T>, rhs: T) -> &mut Self {
        self.push(coeffs, RowKind::Ge, rhs)
    }

    pub fn add_eq(&mut self, coeffs: Vec<T>, rhs: T) -> &mut Self {
        self.push(coeffs, RowKind::Eq, rhs)
    }

    /// Sparse helper: coefficients given as `(index, value)` pairs.
    pub fn add_sparse_le(&mut self, terms: &[(usize, T)], rhs: T) -> &mut Self {
        let row = self.dense(terms);
        self.push(row, RowKind::Le, rhs)
    }

    pub fn add_sparse_ge(&mut self, terms: &[(usize, T)], rhs: T) -> &mut Self {
        let row = self.dense(terms);
        self.push(row, RowKind::Ge, rhs)
    }

    pub fn add_sparse_eq(&mut self, terms: &[(usize, T)], rhs: T) -> &mut Self {
        let row = self.dense(terms);
        self.push(row, RowKind::Eq, rhs)
    }

    fn dense(&self, terms: &[(usize, T)]) -> Vec<T> {
        let mut row = vec![T::zero(); self.dim];
        for (j, v) in terms {
            row[*j] = row[*j].clone() + v.clone();
        }
        row
    }

    fn push(&mut self, coeffs: Vec<T>, kind: RowKind, rhs: T) -> &mut Self {
        assert_eq!(coeffs.len(), self.dim, "constraint row has wrong length");
        self.rows.push((coeffs, kind, rhs));
        self
    }

    /// Appends the rows and bounds of a polytope over a prefix of the coordinates.
    pub fn extend_rows_from(&mut self, other: &Polytope<T>) -> &mut Self {
        assert!(other.dim <= self.dim, "source polytope has more coordinates");
        for (row, kind, rhs) in &other.rows {
            let mut padded = row.clone();
            padded.resize(self.dim, T::zero());
            self.rows.push((padded, *kind, rhs.clone()));
        }
        self.lower[..other.dim].clone_from_slice(&other.lower);
        self.upper[..other.dim].clone_from_slice(&other.upper);
        self
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Largest constraint violation at `z` (bounds included).
    pub fn max_violation(&self, z: &[T]) -> T {
        let mut worst = T::zero();
        let mut bump = |v: T| {
            if v > worst {
                worst = v;
            }
        };
        for (row, kind, rhs) in &self.rows {
            let lhs = row
                .iter()
                .zip(z)
                .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
            match kind {
                RowKind::Le => bump(lhs - rhs.clone()),
                RowKind::Ge => bump(rhs.clone() - lhs),
                RowKind::Eq => bump((lhs - rhs.clone()).abs()),
            }
        }
        for (j, v) in z.iter().enumerate() {
            if let Some(lo) = &self.lower[j] {
                bump(lo.clone() - v.clone());
            }
            if let Some(hi) = &self.upper[j] {
                bump(v.clone() - hi.clone());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T = f64> {
    pub status: LpStatus,
    pub point: Vec<T>,
    pub objective: T,
}

impl<T: LpScalar> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn failed(status: LpStatus) -> Self {
        LpSolution {
            status,
            point: Vec::new(),
            objective: T::zero(),
        }
    }
}

/// Minimizes `objectiveᵀ z` over the polytope.
pub fn solve_lp<T: LpScalar>(objective: &[T], polytope: &Polytope<T>) -> LpSolution<T> {
    assert_eq!(objective.len(), polytope.dim, "objective has wrong length");
    StandardForm::build(objective, polytope).solve()
}

/// Maximizes `objectiveᵀ z` over the polytope.
pub fn maximize_lp<T: LpScalar>(objective: &[T], polytope: &Polytope<T>) -> LpSolution<T> {
    let neg: Vec<T> = objective.iter().map(|c| -c.clone()).collect();
    let mut sol = solve_lp(&neg, polytope);
    sol.objective = -sol.objective;
    sol
}

/// How an original coordinate is recovered from standard-form variables.
#[derive(Debug, Clone)]
enum VarMap<T> {
    /// `z = offset + s`
    Shift { col: usize, offset: T },
    /// `z = offset - s`
    Mirror { col: usize, offset: T },
    /// `z = s⁺ - s⁻`
    Split { pos: usize, neg: usize },
}

struct StandardForm<T> {
    /// Constraint rows over structural columns, all with `rhs ≥ 0`.
    rows: Vec<(Vec<T>, RowKind, T)>,
    cost: Vec<T>,
    cost_offset: T,
    map: Vec<VarMap<T>>,
}

impl<T: LpScalar> StandardForm<T> {
    fn build(objective: &[T], p: &Polytope<T>) -> Self {
        let mut map = Vec::with_capacity(p.dim);
        let mut ncols = 0;
        let mut extra_rows: Vec<(usize, T)> = Vec::new();
        for j in 0..p.dim {
            match (&p.lower[j], &p.upper[j]) {
                (Some(lo), hi) => {
                    if let Some(hi) = hi {
                        extra_rows.push((ncols, hi.clone() - lo.clone()));
                    }
                    map.push(VarMap::Shift {
                        col: ncols,
                        offset: lo.clone(),
                    });
                    ncols += 1;
                }
                (None, Some(hi)) => {
                    map.push(VarMap::Mirror {
                        col: ncols,
                        offset: hi.clone(),
                    });
                    ncols += 1;
                }
                (None, None) => {
                    map.push(VarMap::Split {
                        pos: ncols,
                        neg: ncols + 1,
                    });
                    ncols += 2;
                }
            }
        }

        let mut cost = vec![T::zero(); ncols];
        let mut cost_offset = T::zero();
        for (j, m) in map.iter().enumerate() {
            let c = objective[j].clone();
            match m {
                VarMap::Shift { col, offset } => {
                    cost[*col] = c.clone();
                    cost_offset = cost_offset + c * offset.clone();
                }
                VarMap::Mirror { col, offset } => {
                    cost[*col] = -c.clone();
                    cost_offset = cost_offset + c * offset.clone();
                }
                VarMap::Split { pos, neg } => {
                    cost[*pos] = c.clone();
                    cost[*neg] = -c;
                }
            }
        }

        let mut rows = Vec::with_capacity(p.rows.len() + extra_rows.len());
        for (coeffs, kind, rhs) in &p.rows {
            let mut row = vec![T::zero(); ncols];
            let mut b = rhs.clone();
            for (j, a) in coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                match &map[j] {
                    VarMap::Shift { col, offset } => {
                        row[*col] = a.clone();
                        b = b - a.clone() * offset.clone();
                    }
                    VarMap::Mirror { col, offset } => {
                        row[*col] = -a.clone();
                        b = b - a.clone() * offset.clone();
                    }
                    VarMap::Split { pos, neg } => {
                        row[*pos] = a.clone();
                        row[*neg] = -a.clone();
                    }
                }
            }
            rows.push((row, *kind, b));
        }
        for (col, width) in extra_rows {
            let mut row = vec![T::zero(); ncols];
            row[col] = T::one();
            rows.push((row, RowKind::Le, width));
        }
        for (row, kind, b) in rows.iter_mut() {
            if b.is_negative() {
                for a in row.iter_mut() {
                    *a = -a.clone();
                }
                *b = -b.clone();
                *kind = match kind {
                    RowKind::Le => RowKind::Ge,
                    RowKind::Ge => RowKind::Le,
                    RowKind::Eq => RowKind::Eq,
                };
            }
        }
        StandardForm {
            rows,
            cost,
            cost_offset,
            map,
        }
    }

    fn recover(&self, s: &[T]) -> Vec<T> {
        self.map
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, offset } => offset.clone() + s[*col].clone(),
                VarMap::Mirror { col, offset } => offset.clone() - s[*col].clone(),
                VarMap::Split { pos, neg } => s[*pos].clone() - s[*neg].clone(),
            })
            .collect()
    }

    fn solve(self) -> LpSolution<T> {
        let nstruct = self.cost.len();
        let m = self.rows.len();
        if m == 0 {
            // Only nonnegativity: optimal at the origin unless some cost is negative.
            if self.cost.iter().any(|c| c < &-T::pivot_tol()) {
                return LpSolution::failed(LpStatus::Unbounded);
            }
            let s = vec![T::zero(); nstruct];
            let point = self.recover(&s);
            return LpSolution {
                status: LpStatus::Optimal,
                point,
                objective: self.cost_offset.clone(),
            };
        }
        let mut tab = Tableau::new(&self.rows, nstruct);
        if !tab.phase_one() {
            return LpSolution::failed(tab.failure.unwrap_or(LpStatus::Infeasible));
        }
        let status = tab.phase_two(&self.cost);
        if status != LpStatus::Optimal {
            return LpSolution::failed(status);
        }
        let s = tab.refined_structural(&self.rows, nstruct);
        let point = self.recover(&s);
        let objective = self
            .cost
            .iter()
            .zip(&s)
            .fold(self.cost_offset.clone(), |acc, (c, v)| acc + c.clone() * v.clone());
        LpSolution {
            status: LpStatus::Optimal,
            point,
            objective,
        }
    }
}

struct Tableau<T> {
    /// `m × (ncols + 1)`, last column is the right-hand side.
    a: Vec<Vec<T>>,
    basis: Vec<usize>,
    ncols: usize,
    /// Column indices of artificial variables start here.
    art_start: usize,
    /// Columns allowed to enter the basis.
    enterable: Vec<bool>,
    failure: Option<LpStatus>,
}

impl<T: LpScalar> Tableau<T> {
    fn new(rows: &[(Vec<T>, RowKind, T)], nstruct: usize) -> Self {
        let m = rows.len();
        let nslack = rows.iter().filter(|r| r.1 != RowKind::Eq).count();
        let nart = rows.iter().filter(|r| r.1 != RowKind::Le).count();
        let art_start = nstruct + nslack;
        let ncols = art_start + nart;
        let mut a = vec![vec![T::zero(); ncols + 1]; m];
        let mut basis = vec![0; m];
        let mut slack = nstruct;
        let mut art = art_start;
        for (i, (coeffs, kind, rhs)) in rows.iter().enumerate() {
            a[i][..nstruct].clone_from_slice(coeffs);
            a[i][ncols] = rhs.clone();
            match kind {
                RowKind::Le => {
                    a[i][slack] = T::one();
                    basis[i] = slack;
                    slack += 1;
                }
                RowKind::Ge => {
                    a[i][slack] = -T::one();
                    slack += 1;
                    a[i][art] = T::one();
                    basis[i] = art;
                    art += 1;
                }
                RowKind::Eq => {
                    a[i][art] = T::one();
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        Tableau {
            a,
            basis,
            ncols,
            art_start,
            enterable: vec![true; ncols],
            failure: None,
        }
    }

    fn rhs(&self, i: usize) -> &T {
        &self.a[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [T]) {
        let piv = self.a[r][c].clone();
        for v in self.a[r].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        self.a[r][c] = T::one();
        let prow = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
            row[c] = T::zero();
        }
        let f = obj[c].clone();
        if !f.is_zero() {
            for (v, p) in obj.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
            obj[c] = T::zero();
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row (length `ncols + 1`; last entry is `-z`).
    fn objective_row(&self, cost: &[T]) -> Vec<T> {
        let mut obj = vec![T::zero(); self.ncols + 1];
        obj[..cost.len()].clone_from_slice(cost);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = obj[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (v, a) in obj.iter_mut().zip(&self.a[i]) {
                *v = v.clone() - cb.clone() * a.clone();
            }
        }
        obj
    }

    /// Runs simplex iterations on `obj` until optimal or unbounded.
    fn iterate(&mut self, obj: &mut [T]) -> LpStatus {
        let tol = T::pivot_tol();
        let neg_tol = -T::feas_tol();
        let mut degenerate_run = 0;
        let mut bland = false;
        for _ in 0..MAX_PIVOTS {
            let mut enter = None;
            let mut best = neg_tol.clone();
            for j in 0..self.ncols {
                if !self.enterable[j] || obj[j] >= neg_tol {
                    continue;
                }
                if bland {
                    enter = Some(j);
                    break;
                }
                if obj[j] < best {
                    best = obj[j].clone();
                    enter = Some(j);
                }
            }
            let Some(c) = enter else {
                return LpStatus::Optimal;
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.a.len() {
                let aic = &self.a[i][c];
                if aic <= &tol {
                    continue;
                }
                let ratio = self.rhs(i).clone() / aic.clone();
                let better = match &leave {
                    None => true,
                    Some((r, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return LpStatus::Unbounded;
            };
            if ratio <= T::pivot_tol() {
                degenerate_run += 1;
                if degenerate_run > DEGENERATE_LIMIT {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c, obj);
            // Keep the basic solution nonnegative under round-off.
            for row in self.a.iter_mut() {
                let b = &mut row[self.ncols];
                if b.is_negative() && *b >= neg_tol {
                    *b = T::zero();
                }
            }
        }
        LpStatus::IterationLimit
    }

    fn phase_one(&mut self) -> bool {
        if self.art_start == self.ncols {
            return true;
        }
        let mut cost = vec![T::zero(); self.ncols];
        for c in cost.iter_mut().skip(self.art_start) {
            *c = T::one();
        }
        let mut obj = self.objective_row(&cost);
        let status = self.iterate(&mut obj);
        if status != LpStatus::Optimal {
            self.failure = Some(status);
            return false;
        }
        let infeas = -obj[self.ncols].clone();
        let scale = self
            .a
            .iter()
            .fold(T::one(), |m, r| if r[self.ncols] > m { r[self.ncols].clone() } else { m });
        if infeas > T::feas_tol() * scale {
            self.failure = Some(LpStatus::Infeasible);
            return false;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= self.art_start {
                let col = (0..self.art_start)
                    .filter(|&j| self.a[i][j].abs() > T::pivot_tol())
                    .max_by(|&x, &y| {
                        self.a[i][x]
                            .abs()
                            .partial_cmp(&self.a[i][y].abs())
                            .unwrap_or(std::cmp::Ordering::Equal)
                    });
                match col {
                    Some(c) => {
                        let mut dummy = vec![T::zero(); self.ncols + 1];
                        self.pivot(i, c, &mut dummy);
                    }
                    None => {
                        self.a.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for e in self.enterable.iter_mut().skip(self.art_start) {
            *e = false;
        }
        true
    }

    fn phase_two(&mut self, cost: &[T]) -> LpStatus {
        let mut obj = self.objective_row(cost);
        self.iterate(&mut obj)
    }

    /// Basic solution recomputed from the original columns (one refinement
    /// step against accumulated pivot error).
    fn refined_structural(&self, rows: &[(Vec<T>, RowKind, T)], nstruct: usize) -> Vec<T> {
        let mut s = vec![T::zero(); nstruct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < nstruct {
                s[b] = self.rhs(i).clone();
            }
        }
        // Column of every basic variable in the original (slack-augmented) system.
        let m = rows.len();
        let mut slack_of_row = vec![None; m];
        let mut next = nstruct;
        for (i, r) in rows.iter().enumerate() {
            if r.1 != RowKind::Eq {
                slack_of_row[i] = Some(next);
                next += 1;
            }
        }
        let original_column = |col: usize| -> Option<Vec<T>> {
            if col < nstruct {
                return Some(rows.iter().map(|r| r.0[col].clone()).collect());
            }
            let row = slack_of_row.iter().position(|s| *s == Some(col))?;
            let sign = if rows[row].1 == RowKind::Le {
                T::one()
            } else {
                -T::one()
            };
            let mut v = vec![T::zero(); m];
            v[row] = sign;
            Some(v)
        };
        let cols: Option<Vec<Vec<T>>> = self.basis.iter().map(|&b| original_column(b)).collect();
        let Some(cols) = cols else {
            return s;
        };
        if cols.len() != m {
            return s;
        }
        let rhs: Vec<T> = rows.iter().map(|r| r.2.clone()).collect();
        if let Some(xb) = solve_dense(&cols, &rhs) {
            let mut refined = vec![T::zero(); nstruct];
            let mut ok = true;
            for (&b, v) in self.basis.iter().zip(&xb) {
                if v < &-T::feas_tol() {
                    ok = false;
                }
                if b < nstruct {
                    refined[b] = if v.is_negative() { T::zero() } else { v.clone() };
                }
            }
            if ok {
                return refined;
            }
        }
        s
    }
}

/// Solves `[c_0 … c_{m-1}] x = rhs` for square systems given by columns.
pub(crate) fn solve_dense<T: LpScalar>(cols: &[Vec<T>], rhs: &[T]) -> Option<Vec<T>> {
    let m = rhs.len();
    let mut a: Vec<Vec<T>> = (0..m)
        .map(|i| {
            let mut row: Vec<T> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    for k in 0..m {
        let piv = (k..m).max_by(|&x, &y| {
            a[x][k]
                .abs()
                .partial_cmp(&a[y][k].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv][k].abs() <= T::pivot_tol() {
            return None;
        }
        a.swap(k, piv);
        let p = a[k][k].clone();
        for v in a[k].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let prow = a[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == k || row[k].is_zero() {
                continue;
            }
            let f = row[k].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
    }
    Some(a.into_iter().map(|r| r[m].clone()).collect())
}
