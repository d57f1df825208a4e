//! Polytope-constrained norm minimization: the CP(u) subproblem of the
//! equilibrium search, distance to a convex hull, and a small ellipsoid method
//! for low-dimensional nonsmooth convex minimization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, max_entry, norm_with_exponent, simplex_repair, Matrix, NormSpec, PointSet, Vector};
use crate::lp::{maximize_lp, solve_lp, Polytope, FEAS_TOL};

/// Stopping tolerance of the first-order path.
pub const SOLVE_TOL: f64 = 1e-7;
const FW_MAX_ITERS: usize = 5000;
const KELLEY_MAX_CUTS: usize = 200;

/// `min ‖Cy − u‖` over `x, y ∈ Δ`, `Ay ≤ π₁𝟙`, `xᵀB ≤ π₂𝟙`, `π ∈ [−1,1]²`,
/// `xᵀu ≥ π₁ + π₂ − ε/2`, with optional extra constraints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CpInstance {
    pub c: Matrix,
    pub u: Vector,
    pub a: Matrix,
    pub b: Matrix,
    pub eps: f64,
    pub norm: NormSpec,
    /// `π₁ + π₂ ≥ α`.
    #[serde(default)]
    pub welfare_floor: Option<f64>,
    /// `‖x‖_q ≤ cap` as `(q, cap)`.
    #[serde(default)]
    pub x_norm_cap: Option<(f64, f64)>,
    /// Residual level the caller compares against. The finite-p solver stops
    /// as soon as the answer relative to it is decided.
    #[serde(default)]
    pub decision_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpSolution {
    pub x: Vector,
    pub y: Vector,
    pub pi1: f64,
    pub pi2: f64,
    /// `‖Cy − u‖` recomputed at the returned `y`.
    pub residual: f64,
}

impl CpInstance {
    pub fn new(c: Matrix, u: Vector, a: Matrix, b: Matrix, eps: f64, norm: NormSpec) -> Self {
        CpInstance {
            c,
            u,
            a,
            b,
            eps,
            norm,
            welfare_floor: None,
            x_norm_cap: None,
            decision_threshold: None,
        }
    }

    fn validate(&self) -> Result<(usize, usize)> {
        let (nx, ny) = (self.a.rows(), self.a.cols());
        if self.b.rows() != nx || self.b.cols() != ny {
            return Err(Error::DimensionMismatch("A and B must have equal shapes".into()));
        }
        if self.c.rows() != nx || self.c.cols() != ny {
            return Err(Error::DimensionMismatch("C must have the shape of A".into()));
        }
        if self.u.dim() != nx {
            return Err(Error::DimensionMismatch(format!(
                "u has dimension {}, expected {nx}",
                self.u.dim()
            )));
        }
        if !(self.eps > 0.0) {
            return Err(Error::invalid("eps", "must be positive"));
        }
        if let Some((q, cap)) = self.x_norm_cap {
            if !(q >= 1.0) || !(cap > 0.0) {
                return Err(Error::invalid("x_norm_cap", "need q >= 1 and cap > 0"));
            }
        }
        Ok((nx, ny))
    }
}

/// Solves CP(u). The max norm without a cap on `x` is one epigraph LP; every
/// other case splits exactly into an `x`-part (maximize `xᵀu − max(Bᵀx)`) that
/// fixes the admissible level of `Ay`, followed by a norm minimization over `y`.
pub fn solve_cp(inst: &CpInstance) -> Result<CpSolution> {
    let (nx, ny) = inst.validate()?;
    if inst.norm == NormSpec::Inf && inst.x_norm_cap.is_none() {
        return solve_cp_epigraph(inst, nx, ny);
    }
    let x = best_row_strategy(inst, nx)?;
    let slack = dot(&x, &inst.u) - pi_floor(max_entry(&inst.b.vec_mul(&x)));
    let tau = (slack + inst.eps / 2.0).min(1.0);
    if tau < -1.0 - FEAS_TOL {
        return Err(Error::Infeasible("no column strategy meets the payoff row".into()));
    }
    let y = min_residual_y(inst, tau.max(-1.0), ny)?;
    finish(inst, x, y)
}

fn pi_floor(v: f64) -> f64 {
    v.max(-1.0)
}

fn solve_cp_epigraph(inst: &CpInstance, nx: usize, ny: usize) -> Result<CpSolution> {
    let (ix, iy, ip1, ip2, it) = (0, nx, nx + ny, nx + ny + 1, nx + ny + 2);
    let dim = it + 1;
    let mut poly = Polytope::new(dim);
    poly.set_bounds(ip1, Some(-1.0), Some(1.0));
    poly.set_bounds(ip2, Some(-1.0), Some(1.0));
    push_simplex(&mut poly, ix, nx);
    push_simplex(&mut poly, iy, ny);
    for i in 0..nx {
        let mut terms: Vec<(usize, f64)> = (0..ny).map(|j| (iy + j, inst.a[(i, j)])).collect();
        terms.push((ip1, -1.0));
        poly.add_sparse_le(&terms, 0.0);
    }
    for j in 0..ny {
        let mut terms: Vec<(usize, f64)> = (0..nx).map(|i| (ix + i, inst.b[(i, j)])).collect();
        terms.push((ip2, -1.0));
        poly.add_sparse_le(&terms, 0.0);
    }
    let mut payoff: Vec<(usize, f64)> = (0..nx).map(|i| (ix + i, -inst.u[i])).collect();
    payoff.extend([(ip1, 1.0), (ip2, 1.0)]);
    poly.add_sparse_le(&payoff, inst.eps / 2.0);
    if let Some(alpha) = inst.welfare_floor {
        poly.add_sparse_ge(&[(ip1, 1.0), (ip2, 1.0)], alpha);
    }
    for i in 0..nx {
        let mut up: Vec<(usize, f64)> = (0..ny).map(|j| (iy + j, inst.c[(i, j)])).collect();
        let mut down: Vec<(usize, f64)> = up.iter().map(|&(k, v)| (k, -v)).collect();
        up.push((it, -1.0));
        down.push((it, -1.0));
        poly.add_sparse_le(&up, inst.u[i]);
        poly.add_sparse_le(&down, -inst.u[i]);
    }
    let mut objective = vec![0.0; dim];
    objective[it] = 1.0;
    let sol = solve_lp(&objective, &poly);
    if !sol.is_optimal() {
        return Err(Error::Infeasible(format!("CP(u) epigraph LP: {:?}", sol.status)));
    }
    let x = sol.point[ix..ix + nx].to_vec();
    let y = sol.point[iy..iy + ny].to_vec();
    finish(inst, x, y)
}

fn push_simplex(poly: &mut Polytope, start: usize, len: usize) {
    let terms: Vec<(usize, f64)> = (start..start + len).map(|j| (j, 1.0)).collect();
    poly.add_sparse_eq(&terms, 1.0);
}

/// Row strategy maximizing `xᵀu − max(max(Bᵀx), −1)` subject to the welfare
/// and `q`-norm constraints.
fn best_row_strategy(inst: &CpInstance, nx: usize) -> Result<Vec<f64>> {
    let ny = inst.b.cols();
    let ip2 = nx;
    let mut poly = Polytope::new(nx + 1);
    poly.set_bounds(ip2, Some(-1.0), Some(1.0));
    push_simplex(&mut poly, 0, nx);
    for j in 0..ny {
        let mut terms: Vec<(usize, f64)> = (0..nx).map(|i| (i, inst.b[(i, j)])).collect();
        terms.push((ip2, -1.0));
        poly.add_sparse_le(&terms, 0.0);
    }
    if let Some(alpha) = inst.welfare_floor {
        let terms: Vec<(usize, f64)> = (0..nx).map(|i| (i, inst.u[i])).collect();
        poly.add_sparse_ge(&terms, alpha - inst.eps / 2.0);
    }
    let mut objective: Vec<f64> = inst.u.to_vec();
    objective.push(-1.0);

    let Some((q, cap)) = inst.x_norm_cap else {
        let sol = maximize_lp(&objective, &poly);
        if !sol.is_optimal() {
            return Err(Error::Infeasible(format!("row-strategy LP: {:?}", sol.status)));
        }
        return Ok(simplex_repair(&sol.point[..nx]));
    };

    // Kelley cutting planes: ‖x'‖_q ≥ ∇‖x‖_q · x' for a 1-homogeneous norm,
    // so each cut keeps the capped set.
    let mut x = Vec::new();
    for _ in 0..KELLEY_MAX_CUTS {
        let sol = maximize_lp(&objective, &poly);
        if !sol.is_optimal() {
            return Err(Error::Infeasible(format!("row-strategy LP: {:?}", sol.status)));
        }
        x = simplex_repair(&sol.point[..nx]);
        let nq = norm_with_exponent(&x, q);
        if nq <= cap * (1.0 + 1e-9) {
            break;
        }
        let grad = q_norm_gradient(&x, q, nq);
        let mut cut = grad;
        cut.push(0.0);
        poly.add_le(cut, cap);
    }
    let x = mix_into_cap(&x, q, cap)?;
    if let Some(alpha) = inst.welfare_floor {
        if dot(&x, &inst.u) < alpha - inst.eps / 2.0 - FEAS_TOL {
            return Err(Error::Infeasible("welfare row lost while enforcing the norm cap".into()));
        }
    }
    Ok(x)
}

fn q_norm_gradient(x: &[f64], q: f64, nq: f64) -> Vec<f64> {
    if q == 1.0 {
        return x.iter().map(|v| v.signum()).collect();
    }
    x.iter()
        .map(|&v| v.signum() * (v.abs() / nq).powf(q - 1.0))
        .collect()
}

/// Smallest mix `(1−λ)x + λ·uniform` with `‖·‖_q ≤ cap`.
fn mix_into_cap(x: &[f64], q: f64, cap: f64) -> Result<Vec<f64>> {
    let n = x.len();
    let uniform = vec![1.0 / n as f64; n];
    let mix = |lam: f64| -> Vec<f64> {
        x.iter().zip(&uniform).map(|(a, b)| (1.0 - lam) * a + lam * b).collect()
    };
    if norm_with_exponent(x, q) <= cap * (1.0 + 1e-12) {
        return Ok(x.to_vec());
    }
    if norm_with_exponent(&uniform, q) > cap * (1.0 + 1e-12) {
        return Err(Error::Infeasible("norm cap excludes the uniform strategy".into()));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if norm_with_exponent(&mix(mid), q) <= cap {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(mix(hi))
}

/// `{y ∈ Δ : Ay ≤ τ𝟙}` as a polytope over `y`.
fn y_polytope(a: &Matrix, tau: f64, ny: usize) -> Polytope {
    let mut poly = Polytope::new(ny);
    push_simplex(&mut poly, 0, ny);
    for i in 0..a.rows() {
        poly.add_le(a.row(i).to_vec(), tau);
    }
    poly
}

fn min_residual_y(inst: &CpInstance, tau: f64, ny: usize) -> Result<Vec<f64>> {
    let poly = y_polytope(&inst.a, tau, ny);
    let start = linf_minimizer(&inst.c, &inst.u, &poly)?;
    if inst.norm == NormSpec::Inf {
        return Ok(start);
    }
    let oracle = |grad: &[f64]| -> Option<Vec<f64>> {
        let sol = solve_lp(grad, &poly);
        sol.is_optimal().then(|| simplex_repair(&sol.point))
    };
    let fw = frank_wolfe(&inst.c, &inst.u, inst.norm, start, oracle, inst.decision_threshold);
    Ok(fw)
}

/// `argmin ‖My − t‖_∞` over a polytope in `y`, by one epigraph LP.
fn linf_minimizer(m: &Matrix, t: &[f64], poly: &Polytope) -> Result<Vec<f64>> {
    let ny = poly.dim();
    let it = ny;
    let mut ext = Polytope::new(ny + 1);
    ext.set_bounds(it, Some(0.0), None);
    ext.extend_rows_from(poly);
    for i in 0..m.rows() {
        let mut up: Vec<f64> = m.row(i).to_vec();
        let mut down: Vec<f64> = up.iter().map(|v| -v).collect();
        up.push(-1.0);
        down.push(-1.0);
        ext.add_le(up, t[i]);
        ext.add_le(down, -t[i]);
    }
    let mut objective = vec![0.0; ny + 1];
    objective[it] = 1.0;
    let sol = solve_lp(&objective, &ext);
    if !sol.is_optimal() {
        return Err(Error::Infeasible(format!("residual LP: {:?}", sol.status)));
    }
    Ok(simplex_repair(&sol.point[..ny]))
}

fn finish(inst: &CpInstance, x: Vec<f64>, y: Vec<f64>) -> Result<CpSolution> {
    let x = simplex_repair(&x);
    let y = simplex_repair(&y);
    let mut pi1 = pi_floor(max_entry(&inst.a.mul_vec(&y)));
    let mut pi2 = pi_floor(max_entry(&inst.b.vec_mul(&x)));
    if let Some(alpha) = inst.welfare_floor {
        let short = alpha - pi1 - pi2;
        if short > 0.0 {
            let r1 = short.min(1.0 - pi1);
            pi1 += r1;
            pi2 = (pi2 + short - r1).min(1.0);
        }
    }
    let r: Vec<f64> = inst
        .c
        .mul_vec(&y)
        .iter()
        .zip(inst.u.iter())
        .map(|(a, b)| a - b)
        .collect();
    Ok(CpSolution {
        x: Vector::new(x)?,
        y: Vector::new(y)?,
        pi1,
        pi2,
        residual: inst.norm.norm(&r),
    })
}

/// Away-step Frank–Wolfe on `½‖My − t‖²` over a polytope given by its linear
/// minimization oracle. Stops once the residual is within [`SOLVE_TOL`] of the
/// certified lower bound, once the outcome against `threshold` is decided, or
/// after a fixed iteration budget.
pub(crate) fn frank_wolfe(
    m: &Matrix,
    t: &[f64],
    norm: NormSpec,
    start: Vec<f64>,
    mut oracle: impl FnMut(&[f64]) -> Option<Vec<f64>>,
    threshold: Option<f64>,
) -> Vec<f64> {
    let residual_at = |y: &[f64]| -> Vec<f64> {
        m.mul_vec(y).iter().zip(t).map(|(a, b)| a - b).collect()
    };
    let phi = |y: &[f64]| 0.5 * norm.norm(&residual_at(y)).powi(2);

    // Active set: atoms with convex weights summing to 1.
    let mut atoms: Vec<Vec<f64>> = vec![start.clone()];
    let mut weights: Vec<f64> = vec![1.0];
    let mut y = start;
    let mut lower_bound = 0.0_f64;

    for _ in 0..FW_MAX_ITERS {
        let r = residual_at(&y);
        let rn = norm.norm(&r);
        if rn <= SOLVE_TOL {
            break;
        }
        let gdir = norm.gradient(&r);
        let grad: Vec<f64> = m.vec_mul(&gdir).iter().map(|g| g * rn).collect();
        let Some(s) = oracle(&grad) else { break };
        let gap = dot(&grad, &y) - dot(&grad, &s);
        let phi_y = 0.5 * rn * rn;
        lower_bound = lower_bound.max((2.0 * (phi_y - gap).max(0.0)).sqrt());
        if rn - lower_bound <= SOLVE_TOL {
            break;
        }
        if let Some(th) = threshold {
            if rn < th || lower_bound >= th {
                break;
            }
        }

        // Away atom: the active atom with the largest gradient product.
        let (away_idx, away_val) = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (i, dot(&grad, a)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty active set");
        let away_gap = away_val - dot(&grad, &y);

        let (dir, step_max, toward) = if gap >= away_gap || atoms.len() == 1 {
            let d: Vec<f64> = s.iter().zip(&y).map(|(a, b)| a - b).collect();
            (d, 1.0, true)
        } else {
            let a = &atoms[away_idx];
            let d: Vec<f64> = y.iter().zip(a).map(|(b, c)| b - c).collect();
            let w = weights[away_idx];
            (d, w / (1.0 - w), false)
        };
        let step = golden_section(|g| phi(&axpy(&y, g, &dir)), step_max);
        if step <= 0.0 {
            break;
        }
        y = axpy(&y, step, &dir);

        if toward {
            weights.iter_mut().for_each(|w| *w *= 1.0 - step);
            match atoms.iter().position(|a| same_point(a, &s)) {
                Some(i) => weights[i] += step,
                None => {
                    atoms.push(s);
                    weights.push(step);
                }
            }
        } else {
            weights.iter_mut().for_each(|w| *w *= 1.0 + step);
            weights[away_idx] -= step;
        }
        let mut i = 0;
        while i < atoms.len() {
            if weights[i] <= 1e-14 && atoms.len() > 1 {
                atoms.swap_remove(i);
                weights.swap_remove(i);
            } else {
                i += 1;
            }
        }
    }
    y
}

fn axpy(y: &[f64], g: f64, d: &[f64]) -> Vec<f64> {
    y.iter().zip(d).map(|(a, b)| a + g * b).collect()
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
}

/// Minimizer of a convex function on `[0, hi]`.
fn golden_section(f: impl Fn(f64) -> f64, hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (0.0, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    // Endpoints are admissible steps and often optimal.
    [(0.0, f(0.0)), (mid, f(mid)), (hi, f(hi))]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|p| p.0)
        .unwrap()
}

/// Distance from `target` to `conv(X)` with witnessing convex weights.
pub fn min_norm_over_hull(x: &PointSet, target: &Vector, norm: NormSpec) -> Result<(f64, Vec<f64>)> {
    if x.is_empty() {
        return Err(Error::invalid("points", "need at least one point"));
    }
    if target.dim() != x.dim() {
        return Err(Error::DimensionMismatch("target and points differ in dimension".into()));
    }
    let n = x.len();
    let m = x.as_columns();
    let mut simplex = Polytope::new(n);
    push_simplex(&mut simplex, 0, n);
    let w = linf_minimizer(&m, target, &simplex)?;
    let gap = |w: &[f64]| -> Vec<f64> { m.mul_vec(w).iter().zip(target.iter()).map(|(a, b)| a - b).collect() };
    let linf = NormSpec::Inf.norm(&gap(&w));
    if norm == NormSpec::Inf || linf <= 1e-12 {
        return Ok((norm.norm(&gap(&w)), w));
    }
    let oracle = |grad: &[f64]| -> Option<Vec<f64>> {
        let j = (0..n).min_by(|&a, &b| grad[a].total_cmp(&grad[b]))?;
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        Some(e)
    };
    let fw = frank_wolfe(&m, target, norm, w, oracle, None);
    let weights = simplex_repair(&fw);
    Ok((norm.norm(&gap(&weights)), weights))
}

/// Central-cut ellipsoid method for a convex function given by value and
/// subgradient, started from the ball of `radius` around `center`, which must
/// contain a minimizer. Each cut certifies `f* ≥ f(c) − √(gᵀPg)`; the loop ends
/// once `stop(best, lower)` holds or after `iters` cuts.
pub(crate) fn ellipsoid_minimize(
    f: impl Fn(&[f64]) -> (f64, Vec<f64>),
    center: Vec<f64>,
    radius: f64,
    iters: usize,
    stop: impl Fn(f64, f64) -> bool,
) -> EllipsoidResult {
    let d = center.len();
    let mut c = center;
    // Shape matrix P, ellipsoid {z : (z−c)ᵀP⁻¹(z−c) ≤ 1}.
    let mut p = vec![vec![0.0; d]; d];
    for (i, row) in p.iter_mut().enumerate() {
        row[i] = radius * radius;
    }
    let mut out = EllipsoidResult {
        value: f64::INFINITY,
        point: c.clone(),
        lower: f64::NEG_INFINITY,
    };
    let df = d as f64;
    for _ in 0..iters {
        let (val, g) = f(&c);
        if val < out.value {
            out.value = val;
            out.point = c.clone();
        }
        let pg: Vec<f64> = p.iter().map(|row| dot(row, &g)).collect();
        let gpg = dot(&g, &pg);
        if !(gpg > 1e-300) {
            // Zero subgradient: c is a minimizer.
            out.lower = out.lower.max(val);
            break;
        }
        let s = gpg.sqrt();
        // Rounding in `val − s` must not lift the bound above a seen value.
        out.lower = out.lower.max(val - s).min(out.value);
        if stop(out.value, out.lower) {
            break;
        }
        let b: Vec<f64> = pg.iter().map(|v| v / s).collect();
        if d == 1 {
            c[0] -= b[0] / 2.0;
            p[0][0] /= 4.0;
        } else {
            for (ci, bi) in c.iter_mut().zip(&b) {
                *ci -= bi / (df + 1.0);
            }
            let scale = df * df / (df * df - 1.0);
            let shrink = 2.0 / (df + 1.0);
            for i in 0..d {
                for j in 0..d {
                    p[i][j] = scale * (p[i][j] - shrink * b[i] * b[j]);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub(crate) struct EllipsoidResult {
    pub value: f64,
    pub point: Vec<f64>,
    /// Certified lower bound on the minimum.
    pub lower: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::LpStatus;
    use proptest::prelude::*;

    fn p2() -> NormSpec {
        NormSpec::p(2.0).unwrap()
    }

    fn game_cp(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, u: Vec<f64>, eps: f64, norm: NormSpec) -> CpInstance {
        let a = Matrix::from_rows(a).unwrap();
        let b = Matrix::from_rows(b).unwrap();
        let c = a.add(&b).unwrap();
        CpInstance::new(c, Vector::new(u).unwrap(), a, b, eps, norm)
    }

    fn check_constraints(inst: &CpInstance, s: &CpSolution) {
        let tol = 1e-9;
        assert!(crate::linalg::in_simplex(&s.x, tol));
        assert!(crate::linalg::in_simplex(&s.y, tol));
        assert!(s.pi1.abs() <= 1.0 + tol && s.pi2.abs() <= 1.0 + tol);
        assert!(max_entry(&inst.a.mul_vec(&s.y)) <= s.pi1 + tol);
        assert!(max_entry(&inst.b.vec_mul(&s.x)) <= s.pi2 + tol);
        assert!(dot(&s.x, &inst.u) >= s.pi1 + s.pi2 - inst.eps / 2.0 - tol);
        if let Some(alpha) = inst.welfare_floor {
            assert!(s.pi1 + s.pi2 >= alpha - tol);
        }
        let r: Vec<f64> = inst.c.mul_vec(&s.y).iter().zip(inst.u.iter()).map(|(a, b)| a - b).collect();
        assert!((inst.norm.norm(&r) - s.residual).abs() <= 1e-10);
    }

    #[test]
    fn zero_game_has_zero_residual() {
        for norm in [NormSpec::Inf, p2()] {
            let inst = game_cp(vec![vec![0.0; 3]; 3], vec![vec![0.0; 3]; 3], vec![0.0; 3], 0.1, norm);
            let s = solve_cp(&inst).unwrap();
            assert!(s.residual <= 1e-12);
            check_constraints(&inst, &s);
        }
    }

    #[test]
    fn planted_equilibrium_column() {
        // Rock-paper-scissors style cyclic game with the uniform equilibrium;
        // u = C ŷ for ŷ uniform.
        let a = vec![vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]];
        let b: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|v| -v * 0.5).collect()).collect();
        let am = Matrix::from_rows(a.clone()).unwrap();
        let bm = Matrix::from_rows(b.clone()).unwrap();
        let u = am.add(&bm).unwrap().mul_vec(&[1.0 / 3.0; 3]);
        for norm in [NormSpec::Inf, p2(), NormSpec::p(3.0).unwrap()] {
            let inst = game_cp(a.clone(), b.clone(), u.clone(), 0.1, norm);
            let s = solve_cp(&inst).unwrap();
            assert!(s.residual <= 1e-8, "{norm}: {}", s.residual);
            check_constraints(&inst, &s);
        }
    }

    #[test]
    fn unreachable_u_is_infeasible() {
        let a = vec![vec![0.5, -0.5], vec![-0.5, 0.5]];
        let b = vec![vec![0.5, -0.5], vec![-0.5, 0.5]];
        let u = vec![-10.0, -10.0];
        for norm in [NormSpec::Inf, p2()] {
            let inst = game_cp(a.clone(), b.clone(), u.clone(), 0.1, norm);
            assert!(matches!(solve_cp(&inst), Err(Error::Infeasible(_))));
        }
        // Cross-check: max over the π box of x·u − π₁ − π₂ is below −ε/2.
        let mut poly = Polytope::new(4);
        poly.set_bounds(2, Some(-1.0), Some(1.0));
        poly.set_bounds(3, Some(-1.0), Some(1.0));
        poly.add_eq(vec![1.0, 1.0, 0.0, 0.0], 1.0);
        let sol = maximize_lp(&[-10.0, -10.0, -1.0, -1.0], &poly);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.objective < -0.05);
    }

    #[test]
    fn welfare_floor_is_respected() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 0.5]];
        let b = a.clone();
        let c = Matrix::from_rows(vec![vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let u = c.mul_vec(&[1.0, 0.0]);
        let mut inst = game_cp(a, b, u, 0.1, NormSpec::Inf);
        inst.welfare_floor = Some(1.9);
        let s = solve_cp(&inst).unwrap();
        check_constraints(&inst, &s);
        assert!(s.x[0] > 0.9 && s.y[0] > 0.9);
        inst.welfare_floor = Some(2.5);
        assert!(solve_cp(&inst).is_err());
    }

    #[test]
    fn norm_cap_holds() {
        let a = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let b = a.clone();
        let u = vec![2.0, 0.0, 0.0];
        let mut inst = game_cp(a, b, u, 0.2, p2());
        let cap = 3f64.powf(-0.5);
        inst.x_norm_cap = Some((2.0, cap));
        let s = solve_cp(&inst).unwrap();
        assert!(norm_with_exponent(&s.x, 2.0) <= cap * (1.0 + 1e-9));
        check_constraints(&inst, &s);
    }

    #[test]
    fn hull_distance_examples() {
        let x = PointSet::from_rows(vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let (d, w) = min_norm_over_hull(&x, &Vector::new(vec![1.0, 1.0]).unwrap(), p2()).unwrap();
        assert!((d - 1.0).abs() <= 1e-7);
        assert!((w[0] - 0.5).abs() <= 1e-6 && (w[1] - 0.5).abs() <= 1e-6);

        let e = PointSet::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let (d, _) = min_norm_over_hull(&e, &Vector::new(vec![1.0 / 3.0; 3]).unwrap(), p2()).unwrap();
        assert!(d <= 1e-12);
        let (d, _) = min_norm_over_hull(&e, e.point(1), NormSpec::p(5.0).unwrap()).unwrap();
        assert!(d <= 1e-12);
    }

    #[test]
    fn hull_distance_to_segment_in_p4() {
        // Closest point of the segment [(0,0),(1,1)] to (1,0) is (½,½) in every norm.
        let x = PointSet::from_rows(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let n4 = NormSpec::p(4.0).unwrap();
        let (d, w) = min_norm_over_hull(&x, &Vector::new(vec![1.0, 0.0]).unwrap(), n4).unwrap();
        assert!((d - n4.norm(&[0.5, 0.5])).abs() <= 1e-7);
        assert!((w[1] - 0.5).abs() <= 1e-4);
    }

    #[test]
    fn ellipsoid_finds_minimum_of_max_of_abs() {
        let f = |z: &[f64]| {
            let a = (z[0] - 0.3).abs();
            let b = (z[1] + 0.2).abs();
            if a >= b {
                (a, vec![(z[0] - 0.3).signum(), 0.0])
            } else {
                (b, vec![0.0, (z[1] + 0.2).signum()])
            }
        };
        let r = ellipsoid_minimize(f, vec![0.0, 0.0], 2.0, 400, |_, _| false);
        assert!(r.value <= 1e-8, "{} at {:?}", r.value, r.point);
        assert!(r.lower <= r.value && r.lower > -1e-6, "lower {}", r.lower);
        let early = ellipsoid_minimize(f, vec![0.0, 0.0], 2.0, 400, |best, lower| best - lower <= 1e-3);
        assert!(early.value - early.lower <= 1e-3 && early.lower <= early.value);
    }

    fn grid_hull_distance(x: &PointSet, t: &[f64], norm: NormSpec, steps: usize) -> f64 {
        let n = x.len();
        let mut best = f64::INFINITY;
        let mut counts = vec![0usize; n];
        fn rec(i: usize, left: usize, counts: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
            if i + 1 == counts.len() {
                counts[i] = left;
                f(counts);
                return;
            }
            for c in 0..=left {
                counts[i] = c;
                rec(i + 1, left - c, counts, f);
            }
        }
        rec(0, steps, &mut counts, &mut |c| {
            let w: Vec<f64> = c.iter().map(|&v| v as f64 / steps as f64).collect();
            let p = x.combine(&w);
            let g: Vec<f64> = p.iter().zip(t).map(|(a, b)| a - b).collect();
            best = best.min(norm.norm(&g));
        });
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn zero_distance_iff_grid_hit(
            grid_pts in prop::collection::vec(prop::collection::vec(0i32..=4, 3), 5),
            n in 1usize..=5,
            cuts in prop::collection::vec(0usize..=50, 4),
            planted in any::<bool>(),
            offset in prop::collection::vec(-0.3f64..0.3, 3),
            pe in prop::sample::select(vec![2.0, 3.0, f64::INFINITY]),
        ) {
            let rows: Vec<Vec<f64>> = grid_pts[..n].iter().map(|r| r.iter().map(|&v| v as f64 / 4.0).collect()).collect();
            let x = PointSet::from_rows(rows).unwrap();
            // Planted targets sit on the 1/50 barycentric grid; the others are
            // pushed off the unit cube containing every hull.
            let mut c = cuts[..n - 1].to_vec();
            c.sort();
            let mut w = Vec::with_capacity(n);
            let mut prev = 0;
            for &k in &c {
                w.push((k - prev) as f64 / 50.0);
                prev = k;
            }
            w.push((50 - prev) as f64 / 50.0);
            let mut t = x.combine(&w);
            if !planted {
                t[0] = 1.2 + offset[0].abs();
                t[1] += offset[1];
                t[2] += offset[2];
            }
            let norm = NormSpec::p(pe).unwrap();
            let (d, w) = min_norm_over_hull(&x, &Vector::new(t.clone()).unwrap(), norm).unwrap();
            let grid = grid_hull_distance(&x, &t, norm, 50);
            prop_assert_eq!(d <= SOLVE_TOL, grid <= SOLVE_TOL, "solver {} grid {}", d, grid);
            prop_assert!(d <= grid + SOLVE_TOL);
            prop_assert!(crate::linalg::in_simplex(&w, 1e-9));
        }

        #[test]
        fn cp_residuals_are_consistent(
            a in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 3),
            b in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 3),
            yw in prop::collection::vec(0.01f64..1.0, 3),
            pe in 2.0f64..6.0,
        ) {
            let am = Matrix::from_rows(a.clone()).unwrap();
            let bm = Matrix::from_rows(b.clone()).unwrap();
            let c = am.add(&bm).unwrap();
            let s: f64 = yw.iter().sum();
            let y: Vec<f64> = yw.iter().map(|v| v / s).collect();
            let u = c.mul_vec(&y);
            let inf = game_cp(a.clone(), b.clone(), u.clone(), 0.5, NormSpec::Inf);
            let fin = game_cp(a, b, u, 0.5, NormSpec::p(pe).unwrap());
            if let Ok(si) = solve_cp(&inf) {
                let r: Vec<f64> = c.mul_vec(&si.y).iter().zip(inf.u.iter()).map(|(p, q)| p - q).collect();
                prop_assert!((NormSpec::Inf.norm(&r) - si.residual).abs() <= 1e-10);
                check_constraints(&inf, &si);
            }
            if let Ok(sf) = solve_cp(&fin) {
                let r: Vec<f64> = c.mul_vec(&sf.y).iter().zip(fin.u.iter()).map(|(p, q)| p - q).collect();
                prop_assert!(NormSpec::Inf.norm(&r) <= sf.residual + 1e-12);
                check_constraints(&fin, &sf);
            }
        }
    }
}
