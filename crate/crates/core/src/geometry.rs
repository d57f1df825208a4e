//! Birkhoff–von Neumann decomposition (exact and sampled), rainbow search for
//! colorful Carathéodory, Tverberg partitions, and the test for a common
//! ε-center of several convex hulls.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caratheodory::{sample_count, sample_count_infinity, sparsify, SparsifyRequest, DEFAULT_C_INF, DEFAULT_DELTA_FAIL};
use crate::convex::{ellipsoid_minimize, min_norm_over_hull, SOLVE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, NormSpec, PointSet, RngSeed, Vector};
use crate::lp::{solve_lp, Polytope};

/// Entries at or below this are treated as zero when matching.
pub const MATCH_TOL: f64 = 1e-10;
const STOCHASTIC_TOL: f64 = 1e-9;
/// Optimality gap at which the max-distance minimization stops.
const VALUE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct DoublyStochastic(Matrix);

impl TryFrom<Matrix> for DoublyStochastic {
    type Error = Error;
    fn try_from(m: Matrix) -> Result<Self> {
        DoublyStochastic::new(m)
    }
}

impl From<DoublyStochastic> for Matrix {
    fn from(d: DoublyStochastic) -> Self {
        d.0
    }
}

impl DoublyStochastic {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::invalid("D", "matrix must be square"));
        }
        let d = m.rows();
        for i in 0..d {
            for j in 0..d {
                if m[(i, j)] < -STOCHASTIC_TOL {
                    return Err(Error::invalid("D", format!("negative entry at [{i}][{j}]")));
                }
            }
            let row: f64 = m.row(i).iter().sum();
            let col: f64 = (0..d).map(|r| m[(r, i)]).sum();
            if (row - 1.0).abs() > STOCHASTIC_TOL || (col - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::invalid("D", format!("row or column {i} does not sum to 1")));
            }
        }
        Ok(DoublyStochastic(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

/// `Σ w_i P_i` with `perms[i][r]` the column of row `r` in `P_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationDecomposition {
    pub perms: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
}

impl PermutationDecomposition {
    pub fn reconstruct(&self, d: usize) -> Matrix {
        let mut m = Matrix::zeros(d, d);
        for (p, w) in self.perms.iter().zip(&self.weights) {
            for (r, &c) in p.iter().enumerate() {
                m.set(r, c, m[(r, c)] + w);
            }
        }
        m
    }

    /// Largest entrywise deviation from `target`.
    pub fn max_error(&self, target: &Matrix) -> f64 {
        let m = self.reconstruct(target.rows());
        m.data()
            .iter()
            .zip(target.data())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

/// Perfect matching on entries above [`MATCH_TOL`] by augmenting paths.
fn perfect_matching(m: &Matrix) -> Option<Vec<usize>> {
    let d = m.rows();
    let mut col_owner: Vec<Option<usize>> = vec![None; d];
    fn augment(r: usize, m: &Matrix, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for c in 0..m.cols() {
            if m[(r, c)] > MATCH_TOL && !seen[c] {
                seen[c] = true;
                if owner[c].map_or(true, |o| augment(o, m, seen, owner)) {
                    owner[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }
    for r in 0..d {
        let mut seen = vec![false; d];
        if !augment(r, m, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut perm = vec![0; d];
    for (c, o) in col_owner.iter().enumerate() {
        perm[o.expect("perfect")] = c;
    }
    Some(perm)
}

/// Repeatedly matches the positive support and subtracts the smallest matched
/// entry. Residual mass below tolerance is folded into the last weight, and
/// affinely dependent permutations are eliminated so at most `(d−1)² + 1`
/// remain.
pub fn birkhoff_decompose(ds: &DoublyStochastic) -> Result<PermutationDecomposition> {
    let d = ds.dim();
    let mut rest = ds.matrix().clone();
    let mut perms = Vec::new();
    let mut weights = Vec::new();
    while rest.data().iter().any(|&v| v > MATCH_TOL) {
        let Some(perm) = perfect_matching(&rest) else {
            let mass: f64 = rest.data().iter().sum::<f64>() / d as f64;
            if mass <= d as f64 * MATCH_TOL {
                break;
            }
            return Err(Error::Decomposition(format!("no perfect matching with {mass:e} mass left")));
        };
        let w = perm.iter().enumerate().map(|(r, &c)| rest[(r, c)]).fold(f64::INFINITY, f64::min);
        for (r, &c) in perm.iter().enumerate() {
            rest.set(r, c, rest[(r, c)] - w);
        }
        perms.push(perm);
        weights.push(w);
    }
    if perms.is_empty() {
        return Err(Error::Decomposition("matrix has no mass".into()));
    }
    let total: f64 = weights.iter().sum();
    *weights.last_mut().unwrap() += 1.0 - total;
    let mut out = PermutationDecomposition { perms, weights };
    reduce_affine(&mut out, d);
    Ok(out)
}

/// Carathéodory reduction: while the permutation matrices are affinely
/// dependent, shift weight along the dependency until one weight vanishes.
fn reduce_affine(dec: &mut PermutationDecomposition, d: usize) {
    let bound = (d - 1) * (d - 1) + 1;
    while dec.perms.len() > bound {
        let cols: Vec<Vec<f64>> = dec
            .perms
            .iter()
            .map(|p| {
                let mut v = vec![0.0; d * d + 1];
                for (r, &c) in p.iter().enumerate() {
                    v[r * d + c] = 1.0;
                }
                v[d * d] = 1.0;
                v
            })
            .collect();
        let Some(lambda) = null_vector(&cols) else { break };
        let t = dec
            .weights
            .iter()
            .zip(&lambda)
            .filter(|(_, &l)| l > 1e-12)
            .map(|(w, l)| w / l)
            .fold(f64::INFINITY, f64::min);
        let mut drop = None;
        for (i, (w, l)) in dec.weights.iter_mut().zip(&lambda).enumerate() {
            *w -= t * l;
            if *l > 1e-12 && (*w / l).abs() <= 1e-12 && drop.is_none() {
                drop = Some(i);
            }
        }
        let i = drop.expect("one weight reaches zero");
        dec.perms.remove(i);
        dec.weights.remove(i);
    }
}

/// A nonzero `λ` with `Σ λ_j cols_j = 0`, normalized to have a positive
/// entry, by Gaussian elimination.
fn null_vector(cols: &[Vec<f64>]) -> Option<Vec<f64>> {
    let m = cols.len();
    let rows = cols.first()?.len();
    let mut a: Vec<Vec<f64>> = (0..rows).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..m {
        let Some(p) = (row..rows).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())) else { break };
        if a[p][col].abs() <= 1e-9 {
            continue;
        }
        a.swap(row, p);
        let piv = a[row][col];
        a[row].iter_mut().for_each(|v| *v /= piv);
        for r in 0..rows {
            if r != row && a[r][col] != 0.0 {
                let f = a[r][col];
                for c in 0..m {
                    a[r][c] -= f * a[row][c];
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    let free = (0..m).find(|c| !pivot_cols.contains(c))?;
    let mut lambda = vec![0.0; m];
    lambda[free] = 1.0;
    for (r, &pc) in pivot_cols.iter().enumerate() {
        lambda[pc] = -a[r][free];
    }
    if lambda.iter().all(|&l| l <= 1e-12) {
        lambda.iter_mut().for_each(|l| *l = -*l);
    }
    Some(lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxBvn {
    /// `k` permutations, repeats allowed, each of weight `1/k`.
    pub decomposition: PermutationDecomposition,
    pub k: usize,
    /// Entrywise maximum deviation from `D`.
    pub max_error: f64,
    pub best_effort: bool,
}

/// Exact decomposition followed by sampling over the flattened permutation
/// matrices in the entrywise p-norm, `p = log₂ max(d, 4)`, with
/// `k = ⌈4pγ²/ε²⌉` and `γ = d^{1/p}`.
pub fn approx_bvn(ds: &DoublyStochastic, eps: f64, seed: RngSeed) -> Result<ApproxBvn> {
    let d = ds.dim();
    let exact = birkhoff_decompose(ds)?;
    let p = (d.max(4) as f64).log2();
    let flat: Vec<Vector> = exact
        .perms
        .iter()
        .map(|perm| {
            let mut v = vec![0.0; d * d];
            for (r, &c) in perm.iter().enumerate() {
                v[r * d + c] = 1.0;
            }
            Vector::new(v)
        })
        .collect::<Result<_>>()?;
    let points = PointSet::new(flat)?;
    let weights: Vec<f64> = {
        let w: Vec<f64> = exact.weights.iter().map(|w| w.max(0.0)).collect();
        let s: f64 = w.iter().sum();
        w.iter().map(|v| v / s).collect()
    };
    let req = SparsifyRequest::new(points, weights, eps, NormSpec::P(p))?;
    let res = sparsify(&req, seed)?;
    let k = res.combination.len();
    let decomposition = PermutationDecomposition {
        perms: res.combination.indices().iter().map(|&i| exact.perms[i].clone()).collect(),
        weights: vec![1.0 / k as f64; k],
    };
    let max_error = decomposition.max_error(ds.matrix());
    Ok(ApproxBvn {
        decomposition,
        k,
        max_error,
        best_effort: res.best_effort,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorClasses {
    pub classes: Vec<PointSet>,
    pub mu: Vector,
}

impl ColorClasses {
    pub fn new(classes: Vec<PointSet>, mu: Vector) -> Result<Self> {
        let d = mu.dim();
        if classes.len() != d + 1 {
            return Err(Error::invalid("classes", format!("need d + 1 = {} classes, got {}", d + 1, classes.len())));
        }
        if let Some(i) = classes.iter().position(|c| c.dim() != d) {
            return Err(Error::DimensionMismatch(format!("class {i} has dimension {}", classes[i].dim())));
        }
        Ok(ColorClasses { classes, mu })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rainbow {
    /// Point index chosen from each class.
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
    pub hull_point: Vector,
    pub distance: f64,
}

pub const RAINBOW_LIMIT: u128 = 1_000_000;

/// First rainbow in lexicographic order whose hull is within `eps` of `μ`.
pub fn find_rainbow(cc: &ColorClasses, eps: f64, norm: NormSpec) -> Result<Rainbow> {
    let sizes: Vec<usize> = cc.classes.iter().map(PointSet::len).collect();
    let total = sizes.iter().fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
    if total > RAINBOW_LIMIT {
        return Err(Error::TooLarge(format!("{total} rainbows exceed {RAINBOW_LIMIT}")));
    }
    let decode = |mut code: u128| -> Vec<usize> {
        let mut idx = vec![0; sizes.len()];
        for (slot, &s) in idx.iter_mut().zip(&sizes).rev() {
            *slot = (code % s as u128) as usize;
            code /= s as u128;
        }
        idx
    };
    let eval = |code: u128| -> Result<Option<Rainbow>> {
        let indices = decode(code);
        let pts: Vec<Vector> = indices.iter().zip(&cc.classes).map(|(&i, c)| c.point(i).clone()).collect();
        let set = PointSet::new(pts)?;
        let (dist, weights) = min_norm_over_hull(&set, &cc.mu, norm)?;
        if dist > eps {
            return Ok(None);
        }
        let hull_point = Vector::new(set.combine(&weights))?;
        let distance = norm.norm(&cc.mu.sub(&hull_point));
        Ok((distance <= eps).then_some(Rainbow {
            indices,
            weights,
            hull_point,
            distance,
        }))
    };
    const BATCH: u128 = 64;
    let mut start = 0;
    while start < total {
        let end = (start + BATCH).min(total);
        let results: Vec<Result<Option<Rainbow>>> = (start..end).into_par_iter().map(eval).collect();
        for r in results {
            if let Some(found) = r? {
                return Ok(found);
            }
        }
        start = end;
    }
    Err(Error::NotFound(format!("no rainbow within {eps} of mu")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcurrentResult {
    pub close: bool,
    pub mu: Option<Vector>,
    /// Best value found of `max_i dist(μ, conv V_i)`.
    pub value: f64,
}

/// Decides whether some `μ` lies within `eps` of every hull, by an exact LP
/// for a common point, the max-norm LP (exact for the max norm, a bracket
/// otherwise), and the ellipsoid method on `max_i dist(μ, conv V_i)`.
///
/// Hull distances for finite `p` come from Frank–Wolfe, so for finite `p` the
/// reported value carries that solver's error (about 1e-7 in value, larger in
/// the subgradient when hulls nearly touch).
pub fn concurrently_close(sets: &[PointSet], eps: f64, norm: NormSpec) -> Result<ConcurrentResult> {
    close_test(sets, eps, norm, false)
}

/// With `decide_only`, the bracket may settle the answer early and `value`
/// is then only a bound on the optimum.
fn close_test(sets: &[PointSet], eps: f64, norm: NormSpec, decide_only: bool) -> Result<ConcurrentResult> {
    let Some(first) = sets.first() else {
        return Err(Error::invalid("sets", "need at least one set"));
    };
    let d = first.dim();
    if let Some(i) = sets.iter().position(|s| s.dim() != d || s.is_empty()) {
        return Err(Error::invalid("sets", format!("set {i} is empty or has the wrong dimension")));
    }
    let verdict = |mu: Vec<f64>, value: f64| -> Result<ConcurrentResult> {
        Ok(ConcurrentResult {
            close: value <= eps + SOLVE_TOL,
            mu: Some(Vector::new(mu)?),
            value,
        })
    };
    let (t_inf, mu_inf) = max_norm_center(sets)?;
    if t_inf <= 1e-12 {
        return verdict(mu_inf, 0.0);
    }
    if norm == NormSpec::Inf {
        return verdict(mu_inf, t_inf);
    }
    // ‖·‖_∞ ≤ ‖·‖_p ≤ d^{1/p}‖·‖_∞ brackets the optimum.
    let at_inf = max_distance(sets, &mu_inf, norm)?.0;
    if decide_only && (t_inf > eps + SOLVE_TOL || at_inf <= eps) {
        return verdict(mu_inf, at_inf.max(t_inf));
    }
    let (center, radius) = bounding_ball(sets);
    let f = |mu: &[f64]| -> (f64, Vec<f64>) {
        max_distance(sets, mu, norm).unwrap_or((f64::INFINITY, vec![0.0; mu.len()]))
    };
    let iters = 200 * (d + 1) * (d + 1);
    let stop = |best: f64, lower: f64| {
        best - lower <= VALUE_TOL || (decide_only && (best <= eps || lower > eps + SOLVE_TOL))
    };
    let res = ellipsoid_minimize(f, center, radius, iters, stop);
    if res.value < at_inf {
        verdict(res.point, res.value)
    } else {
        verdict(mu_inf, at_inf)
    }
}

/// `max_i dist(μ, conv V_i)` with a subgradient in `μ`.
fn max_distance(sets: &[PointSet], mu: &[f64], norm: NormSpec) -> Result<(f64, Vec<f64>)> {
    let target = Vector::new(mu.to_vec())?;
    let mut best = (f64::NEG_INFINITY, vec![0.0; mu.len()]);
    for s in sets {
        let (dist, w) = min_norm_over_hull(s, &target, norm)?;
        if dist > best.0 {
            let proj = s.combine(&w);
            let diff: Vec<f64> = mu.iter().zip(&proj).map(|(a, b)| a - b).collect();
            best = (dist, norm.gradient(&diff));
        }
    }
    Ok(best)
}

/// `min_{μ, t} t` with `‖μ − V_i λ_i‖_∞ ≤ t` for every set.
fn max_norm_center(sets: &[PointSet]) -> Result<(f64, Vec<f64>)> {
    let d = sets[0].dim();
    let offsets: Vec<usize> = sets
        .iter()
        .scan(d, |acc, s| {
            let o = *acc;
            *acc += s.len();
            Some(o)
        })
        .collect();
    let it = d + sets.iter().map(PointSet::len).sum::<usize>();
    let mut poly = Polytope::new(it + 1);
    for j in 0..d {
        poly.free(j);
    }
    for (s, &off) in sets.iter().zip(&offsets) {
        poly.add_sparse_eq(&(off..off + s.len()).map(|j| (j, 1.0)).collect::<Vec<_>>(), 1.0);
        for c in 0..d {
            let mut up: Vec<(usize, f64)> = vec![(c, 1.0), (it, -1.0)];
            let mut down: Vec<(usize, f64)> = vec![(c, -1.0), (it, -1.0)];
            for (k, p) in s.points().iter().enumerate() {
                up.push((off + k, -p[c]));
                down.push((off + k, p[c]));
            }
            poly.add_sparse_le(&up, 0.0);
            poly.add_sparse_le(&down, 0.0);
        }
    }
    let mut objective = vec![0.0; it + 1];
    objective[it] = 1.0;
    let sol = solve_lp(&objective, &poly);
    if !sol.is_optimal() {
        return Err(Error::Infeasible(format!("center LP: {:?}", sol.status)));
    }
    Ok((sol.objective.max(0.0), sol.point[..d].to_vec()))
}

/// Centroid of all points and twice the largest distance to it (plus one), a
/// ball containing every minimizer of the max-distance objective.
fn bounding_ball(sets: &[PointSet]) -> (Vec<f64>, f64) {
    let d = sets[0].dim();
    let all: Vec<&Vector> = sets.iter().flat_map(|s| s.points()).collect();
    let mut c = vec![0.0; d];
    for p in &all {
        for (ci, pi) in c.iter_mut().zip(p.iter()) {
            *ci += pi / all.len() as f64;
        }
    }
    let r = all
        .iter()
        .map(|p| p.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    (c, 2.0 * r * (d as f64).sqrt() + 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TverbergInstance {
    pub points: PointSet,
    pub r: usize,
    pub eps: f64,
    pub norm: NormSpec,
}

impl TverbergInstance {
    pub fn new(points: PointSet, r: usize, eps: f64, norm: NormSpec) -> Result<Self> {
        if r < 2 {
            return Err(Error::invalid("r", "need at least two parts"));
        }
        let need = (r - 1) * (points.dim() + 1) + 1;
        if points.len() != need {
            return Err(Error::invalid("points", format!("need (r−1)(d+1)+1 = {need} points, got {}", points.len())));
        }
        if !(eps >= 0.0) {
            return Err(Error::invalid("eps", "must be nonnegative"));
        }
        Ok(TverbergInstance { points, r, eps, norm })
    }

    /// Part-size cap from the sample bound of the instance's γ, at most `n`.
    pub fn part_cap(&self) -> usize {
        let n = self.points.len();
        if self.eps == 0.0 {
            return n;
        }
        let t = match self.norm {
            NormSpec::P(p) => {
                let g = self.points.gamma(self.norm);
                if g == 0.0 {
                    1
                } else {
                    sample_count(p, g, self.eps).unwrap_or(n)
                }
            }
            NormSpec::Inf => sample_count_infinity(n, self.eps, DEFAULT_C_INF, DEFAULT_DELTA_FAIL).unwrap_or(n),
        };
        t.clamp(1, n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TverbergPartition {
    pub parts: Vec<Vec<usize>>,
    pub mu: Vector,
    /// `max_i dist(μ, conv X_i)` for the returned parts.
    pub distance: f64,
}

/// Exhaustive search over assignments of points to `r` nonempty parts of size
/// at most the cap (or to no part), canonical up to relabeling. An exact
/// common point is searched first, then common ε-centers. Unused points are
/// dealt round-robin to the parts afterwards.
pub fn find_tverberg_partition(inst: &TverbergInstance) -> Result<TverbergPartition> {
    let n = inst.points.len();
    let cap = inst.part_cap();
    let assignments = canonical_assignments(n, inst.r, cap);
    let to_sets = |labels: &[usize]| -> Result<Vec<PointSet>> {
        (0..inst.r)
            .map(|part| {
                let idx: Vec<usize> = (0..n).filter(|&i| labels[i] == part).collect();
                Ok(inst.points.subset(&idx))
            })
            .collect()
    };
    let exact = first_hit(&assignments, |labels| {
        let (t, mu) = max_norm_center(&to_sets(labels)?)?;
        Ok((t <= 1e-12).then_some(mu))
    })?;
    let (labels, mu) = match exact {
        Some(hit) => hit,
        None => {
            let approx = first_hit(&assignments, |labels| {
                let res = close_test(&to_sets(labels)?, inst.eps, inst.norm, true)?;
                Ok(if res.close { res.mu.map(Vector::into_inner) } else { None })
            })?;
            approx.ok_or_else(|| Error::NotFound(format!("no partition with parts of size <= {cap} is {}-close", inst.eps)))?
        }
    };
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); inst.r];
    let mut next = 0;
    for (i, &l) in labels.iter().enumerate() {
        if l < inst.r {
            parts[l].push(i);
        } else {
            parts[next % inst.r].push(i);
            next += 1;
        }
    }
    parts.iter_mut().for_each(|p| p.sort_unstable());
    let sets: Vec<PointSet> = parts.iter().map(|p| inst.points.subset(p)).collect();
    let distance = max_distance(&sets, &mu, inst.norm)?.0.max(0.0);
    Ok(TverbergPartition {
        parts,
        mu: Vector::new(mu)?,
        distance,
    })
}

fn first_hit(
    assignments: &[Vec<usize>],
    eval: impl Fn(&[usize]) -> Result<Option<Vec<f64>>> + Sync,
) -> Result<Option<(Vec<usize>, Vec<f64>)>> {
    for chunk in assignments.chunks(64) {
        let results: Vec<Result<Option<Vec<f64>>>> = chunk.par_iter().map(|a| eval(a)).collect();
        for (a, r) in chunk.iter().zip(results) {
            if let Some(mu) = r? {
                return Ok(Some((a.clone(), mu)));
            }
        }
    }
    Ok(None)
}

/// Labels in `0..r` (parts) or `r` (unused). Part `j + 1` opens only after
/// part `j`, every part is nonempty and holds at most `cap` points.
fn canonical_assignments(n: usize, r: usize, cap: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, r: usize, cap: usize, opened: usize, labels: &mut Vec<usize>, sizes: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n - i < r - opened {
            return;
        }
        if i == n {
            out.push(labels.clone());
            return;
        }
        for l in 0..=r {
            let open_new = l == opened && l < r;
            if l < r && l > opened {
                continue;
            }
            if l < r && sizes[l] >= cap {
                continue;
            }
            if l == r && n - i - 1 < r - opened {
                continue;
            }
            labels.push(l);
            if l < r {
                sizes[l] += 1;
            }
            rec(i + 1, n, r, cap, if open_new { opened + 1 } else { opened }, labels, sizes, out);
            if l < r {
                sizes[l] -= 1;
            }
            labels.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, cap, 0, &mut Vec::with_capacity(n), &mut vec![0; r], &mut out);
    out
}
