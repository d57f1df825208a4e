//! Approximate Carathéodory: sparse uniform combinations close to a point of a
//! convex hull, found by i.i.d. sampling from its convex weights, plus the
//! exhaustive enumerator of all small uniform combinations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{combination_vector, NormSpec, PointSet, RngSeed, UniformCombination, Vector};

pub const DEFAULT_MAX_RETRIES: usize = 32;
/// Hoeffding constant for entries in `[-1, 1]`: `m = c·ln(2n/δ)/ε²`.
pub const DEFAULT_C_INF: f64 = 2.0;
pub const DEFAULT_DELTA_FAIL: f64 = 0.1;

const WEIGHT_TOL: f64 = 1e-9;

/// `⌈4 p γ² / ε²⌉`: samples sufficient for expected p-distance at most `eps`.
pub fn sample_count(p: f64, gamma: f64, eps: f64) -> Result<usize> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(Error::invalid("p", format!("need finite p >= 2, got {p}")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid("gamma", format!("need gamma > 0, got {gamma}")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid("eps", format!("need eps > 0, got {eps}")));
    }
    Ok(ceil_count(4.0 * p * gamma * gamma / (eps * eps)))
}

/// `⌈c·ln(2n/δ)/ε²⌉`, at least 1.
pub fn sample_count_infinity(n: usize, eps: f64, c_inf: f64, delta_fail: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps", "must be positive"));
    }
    if !(delta_fail > 0.0 && delta_fail < 1.0) {
        return Err(Error::invalid("delta_fail", "must lie in (0, 1)"));
    }
    if !(c_inf > 0.0) {
        return Err(Error::invalid("c_inf", "must be positive"));
    }
    let raw = c_inf * (2.0 * n as f64 / delta_fail).ln() / (eps * eps);
    Ok(ceil_count(raw).max(1))
}

// Products like 4·2/0.1² land a hair above an integer in floating point.
fn ceil_count(raw: f64) -> usize {
    (raw * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparsifyRequest {
    pub points: PointSet,
    pub target: Vector,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    pub eps: f64,
    pub norm: NormSpec,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
}

fn default_retries() -> usize {
    DEFAULT_MAX_RETRIES
}

impl SparsifyRequest {
    pub fn new(points: PointSet, weights: Vec<f64>, eps: f64, norm: NormSpec) -> Result<Self> {
        let target = Vector::new(points.combine(&weights))?;
        Ok(SparsifyRequest {
            points,
            target,
            weights: Some(weights),
            eps,
            norm,
            max_retries: DEFAULT_MAX_RETRIES,
        })
    }

    pub fn with_retries(mut self, max_retries: usize) -> Self {
        self.max_retries = max_retries;
        self
    }

    fn validated_weights(&self) -> Result<&[f64]> {
        let w = self.weights.as_deref().ok_or(Error::WeightsRequired)?;
        let n = self.points.len();
        if w.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {n} points",
                w.len()
            )));
        }
        if self.target.dim() != self.points.dim() {
            return Err(Error::DimensionMismatch(format!(
                "target has dimension {}, points have {}",
                self.target.dim(),
                self.points.dim()
            )));
        }
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("weights", "must be finite and nonnegative"));
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::invalid("weights", format!("sum to {total}, expected 1")));
        }
        let generated = self.points.combine(w);
        let gap = NormSpec::Inf.norm(&self.target.sub(&generated));
        if gap > WEIGHT_TOL {
            return Err(Error::invalid(
                "weights",
                format!("generate a point {gap:e} away from the target"),
            ));
        }
        if !(self.eps > 0.0) {
            return Err(Error::invalid("eps", "must be positive"));
        }
        if self.max_retries == 0 {
            return Err(Error::invalid("max_retries", "must be at least 1"));
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsifyResult {
    pub combination: UniformCombination,
    pub achieved_distance: f64,
    pub sample_count_m: usize,
    pub retries_used: usize,
    /// Set when no attempt met the acceptance threshold.
    pub best_effort: bool,
}

/// Samples `m = ⌈4pγ²/ε²⌉` indices i.i.d. from the weights and returns their
/// uniform combination. Attempts are repeated with fresh sub-streams of `seed`
/// until the distance is at most `2ε` (each attempt succeeds with probability
/// at least 1/2) or `max_retries` runs out; the closest draw is kept.
pub fn sparsify(req: &SparsifyRequest, seed: RngSeed) -> Result<SparsifyResult> {
    let weights = req.validated_weights()?;
    let NormSpec::P(p) = req.norm else {
        return Err(Error::invalid(
            "norm",
            "finite p required; use sparsify_infinity for the max norm",
        ));
    };
    let gamma = req.points.gamma(req.norm);
    let m = if gamma == 0.0 {
        1
    } else {
        sample_count(p, gamma, req.eps)?
    };
    sample_until(req, weights, m, 2.0 * req.eps, seed)
}

/// Max-norm variant for points in the unit ∞-ball, with the Hoeffding sample
/// size `⌈c·ln(2n/δ)/ε²⌉`. An attempt is accepted once it is within `ε`.
pub fn sparsify_infinity(
    req: &SparsifyRequest,
    seed: RngSeed,
    c_inf: f64,
    delta_fail: f64,
) -> Result<SparsifyResult> {
    let weights = req.validated_weights()?;
    if req.points.gamma(NormSpec::Inf) > 1.0 + 1e-12 {
        return Err(Error::invalid("points", "max-norm of every point must be at most 1"));
    }
    let m = sample_count_infinity(req.points.len(), req.eps, c_inf, delta_fail)?;
    let inf_req = SparsifyRequest {
        norm: NormSpec::Inf,
        ..req.clone()
    };
    sample_until(&inf_req, weights, m, req.eps, seed)
}

fn sample_until(
    req: &SparsifyRequest,
    weights: &[f64],
    m: usize,
    threshold: f64,
    seed: RngSeed,
) -> Result<SparsifyResult> {
    let cumulative: Vec<f64> = weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let mut best: Option<SparsifyResult> = None;
    let mut attempts = 0;
    for attempt in 0..req.max_retries {
        attempts = attempt + 1;
        let mut rng = seed.stream(attempt as u64);
        let draws: Vec<usize> = (0..m).map(|_| draw_index(&cumulative, &mut rng)).collect();
        let combination = UniformCombination::new(draws)?;
        let approx = combination_vector(&combination, &req.points)?;
        let distance = req.norm.norm(&req.target.sub(&approx));
        let improves = best
            .as_ref()
            .map_or(true, |b| distance < b.achieved_distance);
        if improves {
            best = Some(SparsifyResult {
                combination,
                achieved_distance: distance,
                sample_count_m: m,
                retries_used: attempts,
                best_effort: distance > threshold,
            });
        }
        if distance <= threshold {
            break;
        }
    }
    let mut out = best.expect("at least one attempt");
    out.retries_used = attempts;
    out.best_effort = out.achieved_distance > threshold;
    Ok(out)
}

/// Inverse-CDF draw over cumulative weights.
fn draw_index<R: Rng>(cumulative: &[f64], rng: &mut R) -> usize {
    let total = *cumulative.last().expect("nonempty weights");
    let u = rng.random::<f64>() * total;
    cumulative
        .partition_point(|&c| c <= u)
        .min(cumulative.len() - 1)
}

/// Empirical mean of `‖Σ r_i u_i‖_p` over `trials` Rademacher sign vectors,
/// paired with the bound `√p (Σ ‖u_i‖_p²)^{1/2}`.
pub fn khintchine_check(
    vectors: &[Vector],
    norm: NormSpec,
    trials: usize,
    seed: RngSeed,
) -> Result<(f64, f64)> {
    let NormSpec::P(p) = norm else {
        return Err(Error::invalid("norm", "finite p required"));
    };
    if trials < 100 {
        return Err(Error::invalid("trials", "at least 100 trials required"));
    }
    let Some(first) = vectors.first() else {
        return Err(Error::invalid("vectors", "need at least one vector"));
    };
    let d = first.dim();
    if vectors.iter().any(|v| v.dim() != d) {
        return Err(Error::DimensionMismatch("vectors of unequal dimension".into()));
    }
    let rhs = p.sqrt() * vectors.iter().map(|u| norm.norm(u).powi(2)).sum::<f64>().sqrt();
    let mut rng = seed.rng();
    let mut acc = vec![0.0; d];
    let mut total = 0.0;
    for _ in 0..trials {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for u in vectors {
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            for (a, x) in acc.iter_mut().zip(u.iter()) {
                *a += s * x;
            }
        }
        total += norm.norm(&acc);
    }
    Ok((total / trials as f64, rhs))
}

/// Lazily yields every multiset of `{0, …, n-1}` with cardinality `1..=k`,
/// sizes ascending and lexicographic within a size.
#[derive(Debug, Clone)]
pub struct UniformEnumerator {
    n: usize,
    max_size: usize,
    current: Option<Vec<usize>>,
}

pub fn enumerate_uniform(n: usize, k: usize) -> UniformEnumerator {
    UniformEnumerator {
        n,
        max_size: k,
        current: if n == 0 || k == 0 {
            None
        } else {
            Some(Vec::new())
        },
    }
}

/// Multisets of cardinality exactly `k`, in lexicographic order.
pub fn enumerate_size(n: usize, k: usize) -> std::iter::Take<UniformEnumerator> {
    let count = if k == 0 { 0 } else { size_count(n, k) };
    let start = match (n, k) {
        (0, _) | (_, 0) => None,
        (_, 1) => Some(Vec::new()),
        _ => Some(vec![n - 1; k - 1]),
    };
    UniformEnumerator {
        n,
        max_size: k,
        current: start,
    }
    .take(usize::try_from(count).unwrap_or(usize::MAX))
}

/// `C(n+k-1, k)`, saturating.
fn size_count(n: usize, k: usize) -> u128 {
    uniform_count(n, k).saturating_sub(uniform_count(n, k - 1))
}

impl Iterator for UniformEnumerator {
    type Item = UniformCombination;

    fn next(&mut self) -> Option<UniformCombination> {
        let cur = self.current.as_mut()?;
        if cur.is_empty() {
            cur.push(0);
        } else {
            match cur.iter().rposition(|&v| v + 1 < self.n) {
                Some(i) => {
                    let v = cur[i] + 1;
                    cur[i..].iter_mut().for_each(|c| *c = v);
                }
                None => {
                    let size = cur.len() + 1;
                    if size > self.max_size {
                        self.current = None;
                        return None;
                    }
                    *cur = vec![0; size];
                }
            }
        }
        Some(UniformCombination::new(cur.clone()).expect("nonempty"))
    }
}

/// `Σ_{j=1..k} C(n+j-1, j)`, saturating.
pub fn uniform_count(n: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1; // C(n-1, 0)
    for j in 1..=k as u128 {
        // C(n+j-1, j) = C(n+j-2, j-1) * (n+j-1) / j
        term = match term.checked_mul(n as u128 + j - 1) {
            Some(t) => t / j,
            None => return u128::MAX,
        };
        total = total.saturating_add(term);
    }
    total
}
