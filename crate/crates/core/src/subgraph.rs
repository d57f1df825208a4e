//! Densest k-subgraph (normalized, `ρ(S) = |E_S|/k²`) through the quadratic
//! program `max xᵀ(½A + I)x` over `{x ∈ Δ : x ≤ 1/k}` and its exact 0-or-1/k
//! rounding, and densest k×k bipartite subgraph through the bilinear program
//! `max xᵀAy` over the same polytope for both sides.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caratheodory::enumerate_uniform;
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix, UniformCombination, Vector};
use crate::lp::{maximize_lp, Polytope, FEAS_TOL};

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    adjacency: Matrix,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;
    fn try_from(r: GraphRepr) -> Result<Self> {
        Graph::new(r.n, r.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl Graph {
    /// Edges are stored as `(min, max)` in sorted order.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "graph needs at least one vertex"));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid("edges", format!("edge ({u}, {v}) has an endpoint outside 0..{n}")));
            }
            if u == v {
                return Err(Error::invalid("edges", format!("self-loop at vertex {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::invalid("edges", format!("duplicate edge ({u}, {v})")));
            }
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut neighbors = vec![Vec::new(); n];
        let mut adjacency = Matrix::zeros(n, n);
        for &(u, v) in &edges {
            neighbors[u].push(v);
            neighbors[v].push(u);
            adjacency.set(u, v, 1.0);
            adjacency.set(v, u, 1.0);
        }
        neighbors.iter_mut().for_each(|l| l.sort_unstable());
        Ok(Graph {
            n,
            edges,
            neighbors,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> &Matrix {
        &self.adjacency
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges with both endpoints in `s`.
    pub fn induced_edges(&self, s: &[usize]) -> usize {
        let mut inside = vec![false; self.n];
        s.iter().for_each(|&v| inside[v] = true);
        self.edges.iter().filter(|&&(u, v)| inside[u] && inside[v]).count()
    }

    /// `Σ_{i∈S, j∈T} A_ij`: an edge with both endpoints in `S ∩ T` counts twice.
    pub fn cross_edges(&self, s: &[usize], t: &[usize]) -> usize {
        let mut in_t = vec![false; self.n];
        t.iter().for_each(|&v| in_t[v] = true);
        s.iter()
            .map(|&i| self.neighbors[i].iter().filter(|&&j| in_t[j]).count())
            .sum()
    }

    pub fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("valid")
    }

    pub fn empty(n: usize) -> Graph {
        Graph::new(n, []).expect("valid")
    }

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).expect("valid")
    }

    /// Star with center 0 and `n − 1` leaves.
    pub fn star(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (0, v))).expect("valid")
    }

    pub fn petersen() -> Graph {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Graph::new(10, outer.chain(spokes).chain(inner)).expect("valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdksInstance {
    pub graph: Graph,
    pub k: usize,
}

impl NdksInstance {
    pub fn new(graph: Graph, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid("k", "densest k-subgraph needs k >= 2"));
        }
        if k > graph.n() {
            return Err(Error::invalid("k", format!("k = {k} exceeds n = {}", graph.n())));
        }
        Ok(NdksInstance { graph, k })
    }

    /// `½A + I`.
    pub fn cq(&self) -> Matrix {
        let n = self.graph.n();
        Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.5 * self.graph.adjacency()[(i, j)] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgraphSolution {
    pub vertices: Vec<usize>,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteSolution {
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    #[serde(rename = "T")]
    pub t: Vec<usize>,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgraphConfig {
    pub eps: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default)]
    pub max_multiset_size: Option<usize>,
    /// Rounds of `x ← argmax xᵀCx` re-linearization after each candidate.
    #[serde(default = "default_ascent")]
    pub ascent_steps: usize,
}

fn default_kappa() -> f64 {
    crate::nash::DEFAULT_KAPPA
}

fn default_ascent() -> usize {
    2
}

impl SubgraphConfig {
    pub fn new(eps: f64) -> Self {
        SubgraphConfig {
            eps,
            kappa: default_kappa(),
            max_multiset_size: None,
            ascent_steps: default_ascent(),
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.max_multiset_size = Some(cap);
        self
    }

    fn cap(&self, p: f64) -> Result<usize> {
        if !(self.eps > 0.0) {
            return Err(Error::invalid("eps", "must be positive"));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::invalid("kappa", "must be positive"));
        }
        if self.max_multiset_size == Some(0) {
            return Err(Error::invalid("max_multiset_size", "must be at least 1"));
        }
        let theory = (self.kappa * p / (self.eps * self.eps) * (1.0 - 1e-12)).ceil().max(1.0);
        let theory = if theory >= usize::MAX as f64 { usize::MAX } else { theory as usize };
        Ok(self.max_multiset_size.map_or(theory, |m| m.min(theory)))
    }
}

fn density(edges: usize, k: usize) -> f64 {
    edges as f64 / (k * k) as f64
}

fn check_capped_simplex(x: &[f64], k: usize, n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!("vector of length {} for {n} vertices", x.len())));
    }
    let cap = 1.0 / k as f64;
    if let Some(i) = x.iter().position(|&v| v < -FEAS_TOL || v > cap + FEAS_TOL) {
        return Err(Error::Infeasible(format!("coordinate {i} = {} outside [0, 1/{k}]", x[i])));
    }
    let s: f64 = x.iter().sum();
    if (s - 1.0).abs() > FEAS_TOL {
        return Err(Error::Infeasible(format!("coordinates sum to {s}")));
    }
    Ok(())
}

/// `xᵀ(½A + I)x` at a feasible point.
pub fn qp_value(inst: &NdksInstance, x: &[f64]) -> Result<f64> {
    check_capped_simplex(x, inst.k, inst.graph.n())?;
    Ok(quad(&inst.graph, x))
}

fn quad(g: &Graph, x: &[f64]) -> f64 {
    let mut v = dot(x, x);
    for &(a, b) in g.edges() {
        v += x[a] * x[b];
    }
    v
}

/// Exact rounding to a vertex of the capped simplex without decreasing the
/// quadratic form. Returns the rounded point and the number of transfers.
pub fn round_to_uniform_exact(g: &Graph, k: usize, y: &[BigRational]) -> Result<(Vec<BigRational>, usize)> {
    let n = g.n();
    if k < 2 {
        return Err(Error::invalid("k", "rounding needs k >= 2"));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!("vector of length {} for {n} vertices", y.len())));
    }
    let cap = BigRational::new(BigInt::one(), BigInt::from(k));
    if y.iter().any(|v| v.is_negative() || *v > cap) || y.iter().sum::<BigRational>() != BigRational::one() {
        return Err(Error::Infeasible("y must lie in the 1/k-capped simplex exactly".into()));
    }
    let mut y = y.to_vec();
    let mut iterations = 0;
    loop {
        let m: Vec<usize> = (0..n).filter(|&i| y[i].is_positive() && y[i] < cap).collect();
        if m.is_empty() {
            break;
        }
        // Mass sums to 1 = k·(1/k), so a fractional set has at least two members.
        debug_assert!(m.len() >= 2);
        let gamma = |i: usize| -> BigRational {
            g.neighbors(i).iter().fold(y[i].clone(), |acc, &j| acc + &y[j])
        };
        let non_adjacent = m
            .iter()
            .enumerate()
            .flat_map(|(a, &i)| m[a + 1..].iter().map(move |&j| (i, j)))
            .find(|&(i, j)| !g.is_adjacent(i, j));
        let (i, j) = match non_adjacent {
            Some((a, b)) => {
                if gamma(a) + &y[a] >= gamma(b) + &y[b] {
                    (a, b)
                } else {
                    (b, a)
                }
            }
            None => {
                let (a, b) = (m[0], m[1]);
                if gamma(a) >= gamma(b) {
                    (a, b)
                } else {
                    (b, a)
                }
            }
        };
        let room = &cap - &y[i];
        let delta = if y[j] < room { y[j].clone() } else { room };
        y[i] += &delta;
        y[j] -= &delta;
        iterations += 1;
    }
    Ok((y, iterations))
}

/// Floating-point entry point: the input is read exactly, clipped into
/// `[0, 1/k]` and its sum corrected before the exact rounding.
pub fn round_to_uniform(inst: &NdksInstance, y: &[f64]) -> Result<Vector> {
    check_capped_simplex(y, inst.k, inst.graph.n())?;
    let exact = repair_to_rational(y, inst.k);
    let (z, _) = round_to_uniform_exact(&inst.graph, inst.k, &exact)?;
    Vector::new(z.iter().map(|v| v.to_f64().unwrap_or(0.0)).collect())
}

fn repair_to_rational(y: &[f64], k: usize) -> Vec<BigRational> {
    let cap = BigRational::new(BigInt::one(), BigInt::from(k));
    let mut r: Vec<BigRational> = y
        .iter()
        .map(|&v| {
            let q = BigRational::from_float(v.max(0.0)).unwrap_or_else(BigRational::zero);
            if q > cap {
                cap.clone()
            } else {
                q
            }
        })
        .collect();
    let mut excess: BigRational = r.iter().sum::<BigRational>() - BigRational::one();
    // Give the deficit to coordinates with room, take the surplus from the
    // largest coordinates, lowest index first in both cases.
    let mut order: Vec<usize> = (0..r.len()).collect();
    if excess.is_negative() {
        for &i in &order {
            if excess.is_zero() {
                break;
            }
            let room = &cap - &r[i];
            let add = if room < -excess.clone() { room } else { -excess.clone() };
            r[i] += &add;
            excess += add;
        }
    } else if excess.is_positive() {
        order.sort_by(|&a, &b| r[b].cmp(&r[a]).then(a.cmp(&b)));
        for &i in &order {
            if excess.is_zero() {
                break;
            }
            let take = if r[i] < excess { r[i].clone() } else { excess.clone() };
            r[i] -= &take;
            excess -= take;
        }
    }
    r
}

/// `argmax_x xᵀw` over the capped simplex, solved by LP.
fn capped_simplex_lp(w: &[f64], k: usize) -> Vec<f64> {
    let n = w.len();
    let mut poly = Polytope::new(n);
    let cap = 1.0 / k as f64;
    for j in 0..n {
        poly.set_bounds(j, Some(0.0), Some(cap));
    }
    poly.add_eq(vec![1.0; n], 1.0);
    let sol = maximize_lp(w, &poly);
    debug_assert!(sol.is_optimal());
    sol.point
}

/// Indices of the `k` largest entries, ties to the lower index, sorted.
fn top_k(w: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    let mut s = idx[..k].to_vec();
    s.sort_unstable();
    s
}

fn indicator(s: &[usize], n: usize, k: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    s.iter().for_each(|&i| x[i] = 1.0 / k as f64);
    x
}

/// Support of a rounded point, padded with the lowest unused ids up to `k`.
fn support_k(z: &[f64], k: usize) -> Vec<usize> {
    let mut s: Vec<usize> = (0..z.len()).filter(|&i| z[i] > 0.0).collect();
    let mut next = 0;
    while s.len() < k {
        if !s.contains(&next) {
            s.push(next);
        }
        next += 1;
    }
    s.sort_unstable();
    s.truncate(k);
    s
}

/// Repeated re-linearization `x ← argmax xᵀCx_prev` followed by exact
/// rounding, returning the best vertex set seen.
pub fn linearization_ascent(inst: &NdksInstance, start: &[f64], steps: usize) -> Result<SubgraphSolution> {
    let cq = inst.cq();
    let n = inst.graph.n();
    let mut x = start.to_vec();
    let mut best: Option<SubgraphSolution> = None;
    for step in 0..=steps {
        if step > 0 {
            x = capped_simplex_lp(&cq.mul_vec(&x), inst.k);
        }
        let z = round_to_uniform(inst, &x)?;
        let s = support_k(&z, inst.k);
        let cand = SubgraphSolution {
            density: density(inst.graph.induced_edges(&s), inst.k),
            vertices: s.clone(),
        };
        if best.as_ref().map_or(true, |b| cand.density > b.density) {
            best = Some(cand);
        }
        x = indicator(&s, n, inst.k);
    }
    Ok(best.expect("at least one step"))
}

/// Evaluates candidates in parallel batches and keeps the best, ties to the
/// earliest candidate.
fn best_over<T: Send, F>(cands: impl Iterator<Item = UniformCombination>, eval: F, better: impl Fn(&T, &T) -> bool) -> Result<T>
where
    F: Fn(&UniformCombination) -> Result<T> + Sync,
{
    const BATCH: usize = 256;
    let mut cands = cands.peekable();
    let mut best: Option<T> = None;
    while cands.peek().is_some() {
        let batch: Vec<UniformCombination> = cands.by_ref().take(BATCH).collect();
        let results: Vec<Result<T>> = batch.par_iter().map(&eval).collect();
        for r in results {
            let r = r?;
            if best.as_ref().map_or(true, |b| better(&r, b)) {
                best = Some(r);
            }
        }
    }
    best.ok_or_else(|| Error::NotFound("no candidates enumerated".into()))
}

/// For each uniform combination `u` of columns of `½A + I`, maximizes `xᵀu`
/// over the capped simplex, re-linearizes, rounds exactly, and keeps the
/// densest vertex set. Multiset sizes go up to `⌈κp/ε²⌉` with
/// `p = max(log₂(d + 1), 2)`, lowered to the override when one is set.
pub fn solve_ndks(inst: &NdksInstance, cfg: &SubgraphConfig) -> Result<SubgraphSolution> {
    let p = ((inst.graph.max_degree() + 1) as f64).log2().max(2.0);
    let cap = cfg.cap(p)?;
    let cq = inst.cq();
    best_over(
        enumerate_uniform(inst.graph.n(), cap),
        |u| {
            let x = capped_simplex_lp(&u.column_average(&cq), inst.k);
            linearization_ascent(inst, &x, cfg.ascent_steps)
        },
        |a, b| a.density > b.density,
    )
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c.saturating_mul(n as u128 - i) / (i + 1);
    }
    c
}

/// Lexicographic k-subsets of `0..n`.
fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        match (0..k).rev().find(|&i| c[i] < n - k + i) {
            Some(i) => {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
            }
            None => cur = None,
        }
        Some(out)
    })
}

pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

/// Exhaustive optimum; the lexicographically first densest set wins.
pub fn ndks_bruteforce(inst: &NdksInstance) -> Result<SubgraphSolution> {
    let (n, k) = (inst.graph.n(), inst.k);
    if binomial(n, k) > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!("C({n}, {k}) subsets exceed {BRUTE_FORCE_LIMIT}")));
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    for s in subsets(n, k) {
        let e = inst.graph.induced_edges(&s);
        if best.as_ref().map_or(true, |b| e > b.0) {
            best = Some((e, s));
        }
    }
    let (e, vertices) = best.expect("k <= n");
    Ok(SubgraphSolution {
        vertices,
        density: density(e, k),
    })
}

fn check_bipartite_k(g: &Graph, k: usize) -> Result<()> {
    if k == 0 || k > g.n() {
        return Err(Error::invalid("k", format!("need 1 <= k <= n = {}, got {k}", g.n())));
    }
    Ok(())
}

fn bipartite(g: &Graph, s: Vec<usize>, t: Vec<usize>, k: usize) -> BipartiteSolution {
    BipartiteSolution {
        density: density(g.cross_edges(&s, &t), k),
        s,
        t,
    }
}

/// For each uniform combination `u` of columns of `A`: `x = argmax xᵀu`,
/// `y = argmax xᵀAy`, then top-k rounding of each side in turn, keeping the
/// densest `(S, T)`. Multiset sizes go up to `⌈κp/ε²⌉`, `p = log₂ max(d, 4)`.
pub fn solve_dkbs(g: &Graph, k: usize, cfg: &SubgraphConfig) -> Result<BipartiteSolution> {
    check_bipartite_k(g, k)?;
    let p = (g.max_degree().max(4) as f64).log2();
    let cap = cfg.cap(p)?;
    let a = g.adjacency();
    let n = g.n();
    best_over(
        enumerate_uniform(n, cap),
        |u| {
            let x = capped_simplex_lp(&u.column_average(a), k);
            let y = capped_simplex_lp(&a.vec_mul(&x), k);
            let s = top_k(&x, k);
            let t = top_k(&a.vec_mul(&indicator(&s, n, k)), k);
            let first = bipartite(g, s, t, k);
            let t2 = top_k(&y, k);
            let s2 = top_k(&a.mul_vec(&indicator(&t2, n, k)), k);
            let second = bipartite(g, s2, t2, k);
            Ok(if second.density > first.density { second } else { first })
        },
        |a, b| a.density > b.density,
    )
}

/// Exhaustive optimum over ordered pairs `(S, T)`, lexicographically first.
pub fn dkbs_bruteforce(g: &Graph, k: usize) -> Result<BipartiteSolution> {
    check_bipartite_k(g, k)?;
    let n = g.n();
    let c = binomial(n, k);
    if c.saturating_mul(c) > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!("C({n}, {k})² pairs exceed {BRUTE_FORCE_LIMIT}")));
    }
    let all: Vec<Vec<usize>> = subsets(n, k).collect();
    let mut best: Option<(usize, usize, usize)> = None;
    for (si, s) in all.iter().enumerate() {
        // Number of neighbors in S of every vertex.
        let mut hits = vec![0usize; n];
        for &i in s {
            for &j in g.neighbors(i) {
                hits[j] += 1;
            }
        }
        for (ti, t) in all.iter().enumerate() {
            let e: usize = t.iter().map(|&j| hits[j]).sum();
            if best.map_or(true, |b| e > b.0) {
                best = Some((e, si, ti));
            }
        }
    }
    let (_, si, ti) = best.expect("k <= n");
    Ok(bipartite(g, all[si].clone(), all[ti].clone(), k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(g: Graph, k: usize) -> NdksInstance {
        NdksInstance::new(g, k).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn exact_quad(g: &Graph, y: &[BigRational]) -> BigRational {
        let mut v: BigRational = y.iter().map(|a| a * a).sum();
        for &(a, b) in g.edges() {
            v += &y[a] * &y[b];
        }
        v
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
        let g: Graph = serde_json::from_str(r#"{"n": 3, "edges": [[2, 0], [1, 2]]}"#).unwrap();
        assert_eq!(g.edges(), &[(0, 2), (1, 2)]);
        assert_eq!(g.max_degree(), 2);
        assert_eq!(Graph::petersen().edges().len(), 15);
        assert!((0..10).all(|v| Graph::petersen().neighbors(v).len() == 3));
    }

    #[test]
    fn qp_value_examples() {
        let k4 = inst(Graph::complete(4), 2);
        assert_eq!(qp_value(&k4, &[0.5, 0.5, 0.0, 0.0]).unwrap(), 0.75);
        assert_eq!(qp_value(&k4, &[0.25; 4]).unwrap(), 0.625);
        let e = inst(Graph::empty(5), 2);
        assert_eq!(qp_value(&e, &[0.5, 0.0, 0.5, 0.0, 0.0]).unwrap(), 0.5);
        assert!(qp_value(&k4, &[1.0, 0.0, 0.0, 0.0]).is_err());
        assert!(NdksInstance::new(Graph::complete(4), 1).is_err());
    }

    #[test]
    fn rounding_examples() {
        let k4 = inst(Graph::complete(4), 2);
        let z = round_to_uniform(&k4, &[0.5, 0.0, 0.5, 0.0]).unwrap();
        assert_eq!(z.as_slice(), &[0.5, 0.0, 0.5, 0.0]);
        let z = round_to_uniform(&k4, &[0.25; 4]).unwrap();
        assert_eq!(qp_value(&k4, &z).unwrap(), 0.75);

        let star = inst(Graph::star(5), 2);
        let y = [0.2; 5];
        let z = round_to_uniform(&star, &y).unwrap();
        assert_eq!(z[0], 0.5);
        assert_eq!(z.iter().filter(|&&v| v == 0.5).count(), 2);
        assert!(qp_value(&star, &z).unwrap() >= qp_value(&star, &y).unwrap());
    }

    #[test]
    fn float_inputs_are_repaired() {
        let g = inst(Graph::path(3), 2);
        let y = [1.0 / 3.0; 3];
        let z = round_to_uniform(&g, &y).unwrap();
        assert!(z.iter().all(|&v| v == 0.0 || v == 0.5));
        assert!(qp_value(&g, &z).unwrap() >= qp_value(&g, &y).unwrap() - 1e-12);
    }

    #[test]
    fn bruteforce_examples() {
        let s = ndks_bruteforce(&inst(Graph::complete(4), 3)).unwrap();
        assert_eq!(s.density, 3.0 / 9.0);
        assert_eq!(ndks_bruteforce(&inst(Graph::path(4), 2)).unwrap().density, 0.25);
        let s = ndks_bruteforce(&inst(Graph::star(5), 3)).unwrap();
        assert_eq!((s.vertices, s.density), (vec![0, 1, 2], 2.0 / 9.0));

        assert_eq!(dkbs_bruteforce(&Graph::path(2), 1).unwrap().density, 1.0);
        assert_eq!(dkbs_bruteforce(&Graph::empty(4), 2).unwrap().density, 0.0);
        let k4 = dkbs_bruteforce(&Graph::complete(4), 2).unwrap();
        assert_eq!(k4.density, 1.0);
        assert!(k4.s.iter().all(|v| !k4.t.contains(v)));
        // Overlapping sides count the shared edge from both ends.
        assert_eq!(Graph::complete(4).cross_edges(&[0, 1], &[0, 2]), 3);
        assert_eq!(Graph::complete(4).cross_edges(&[0, 1], &[0, 1]), 2);
    }

    #[test]
    fn ndks_examples() {
        let cfg = SubgraphConfig::new(0.2).with_cap(2);
        assert_eq!(solve_ndks(&inst(Graph::complete(4), 2), &cfg).unwrap().density, 0.25);
        let e = solve_ndks(&inst(Graph::empty(5), 2), &cfg).unwrap();
        assert_eq!((e.vertices.len(), e.density), (2, 0.0));
        let pet = inst(Graph::petersen(), 4);
        let got = solve_ndks(&pet, &SubgraphConfig::new(0.25).with_cap(2)).unwrap();
        let best = ndks_bruteforce(&pet).unwrap();
        assert!(got.density >= best.density - 0.25);
        assert_eq!(got.density, density(pet.graph.induced_edges(&got.vertices), 4));
    }

    #[test]
    fn dkbs_examples() {
        let cfg = SubgraphConfig::new(0.25).with_cap(2);
        let c4 = Graph::new(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(solve_dkbs(&c4, 2, &cfg).unwrap().density, 1.0);
        let p3 = solve_dkbs(&Graph::path(3), 1, &cfg).unwrap();
        assert_eq!(p3.density, 1.0);
        let pet = Graph::petersen();
        let got = solve_dkbs(&pet, 3, &cfg).unwrap();
        assert!(got.density >= dkbs_bruteforce(&pet, 3).unwrap().density - 0.25);
    }

    /// Integer weights in `[0, t]` summing to `k·t`, so `w/(k·t)` lies in the
    /// capped simplex. Deficit or surplus is moved greedily in index order.
    fn capped_weights(raw: &[u32], k: usize, t: u32) -> Vec<u32> {
        let mut w: Vec<u32> = raw.iter().map(|&v| v.min(t)).collect();
        let target = k as u32 * t;
        let mut total: u32 = w.iter().sum();
        for v in w.iter_mut() {
            if total < target {
                let add = (t - *v).min(target - total);
                *v += add;
                total += add;
            } else if total > target {
                let take = (*v).min(total - target);
                *v -= take;
                total -= take;
            }
        }
        w
    }

    proptest! {
        #[test]
        fn rounding_never_decreases_value(
            n in 3usize..9,
            edge_bits in prop::collection::vec(any::<bool>(), 36),
            weights in prop::collection::vec(0u32..=20, 9),
            k in 2usize..4,
        ) {
            let mut edges = Vec::new();
            let mut b = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if edge_bits[b % 36] { edges.push((u, v)); }
                    b += 1;
                }
            }
            let g = Graph::new(n, edges).unwrap();
            let k = k.min(n);
            let t = 20;
            let w = capped_weights(&weights[..n], k, t);
            let y: Vec<BigRational> = w.iter().map(|&v| rat(v as i64, (k as u32 * t) as i64)).collect();
            let (z, iters) = round_to_uniform_exact(&g, k, &y).unwrap();
            let cap = rat(1, k as i64);
            prop_assert!(z.iter().all(|v| v.is_zero() || *v == cap));
            prop_assert!(iters <= n);
            prop_assert!(exact_quad(&g, &z) >= exact_quad(&g, &y));
        }
    }
}
