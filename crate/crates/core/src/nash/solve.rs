use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::game::{sparsity, verify_eps_nash, BimatrixGame, EquilibriumCertificate, MixedProfile};
use crate::caratheodory::{enumerate_size, enumerate_uniform, sparsify, SparsifyRequest};
use crate::convex::{solve_cp, CpInstance, CpSolution, SOLVE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    dot, l0_count, max_entry, norm_with_exponent, simplex_repair, Matrix, NormSpec, PointSet, RngSeed,
    UniformCombination, Vector,
};
use crate::lp::{solve_lp, Polytope};

pub const DEFAULT_KAPPA: f64 = 256.0;
pub const DEFAULT_RANDOM_DRAWS: usize = 10_000;
/// Candidates evaluated per parallel batch.
const BATCH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NormMode {
    #[default]
    InfLp,
    PNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub eps: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default)]
    pub norm_mode: NormMode,
    #[serde(default)]
    pub max_multiset_size: Option<usize>,
    #[serde(default)]
    pub welfare_floor: Option<f64>,
    #[serde(default)]
    pub seed: RngSeed,
    #[serde(default)]
    pub randomized_mode: bool,
    /// Number of sampled multisets in randomized mode.
    #[serde(default = "default_draws")]
    pub random_draws: usize,
}

fn default_kappa() -> f64 {
    DEFAULT_KAPPA
}

fn default_draws() -> usize {
    DEFAULT_RANDOM_DRAWS
}

impl SolveConfig {
    pub fn new(eps: f64) -> Self {
        SolveConfig {
            eps,
            kappa: DEFAULT_KAPPA,
            norm_mode: NormMode::InfLp,
            max_multiset_size: None,
            welfare_floor: None,
            seed: RngSeed(0),
            randomized_mode: false,
            random_draws: DEFAULT_RANDOM_DRAWS,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.max_multiset_size = Some(cap);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 2.0) {
            return Err(Error::invalid("eps", format!("must lie in (0, 2], got {}", self.eps)));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::invalid("kappa", "must be positive"));
        }
        if self.max_multiset_size == Some(0) {
            return Err(Error::invalid("max_multiset_size", "must be at least 1"));
        }
        if let Some(a) = self.welfare_floor {
            if !a.is_finite() {
                return Err(Error::invalid("welfare_floor", "must be finite"));
            }
        }
        if self.randomized_mode && self.random_draws == 0 {
            return Err(Error::invalid("random_draws", "must be at least 1"));
        }
        Ok(())
    }

    /// `⌈κp/ε²⌉`, lowered to the override when one is set.
    pub fn multiset_cap(&self, p: f64) -> usize {
        let theory = (self.kappa * p / (self.eps * self.eps) * (1.0 - 1e-12)).ceil();
        let theory = if theory >= usize::MAX as f64 { usize::MAX } else { theory.max(1.0) as usize };
        self.max_multiset_size.map_or(theory, |m| m.min(theory))
    }
}

/// `max(2·log₂(s/m), 2)`.
pub fn small_prob_exponent(s: f64, m: f64) -> f64 {
    (2.0 * (s / m).log2()).max(2.0)
}

/// Runs `eval` over the stream in batches, in parallel within a batch, and
/// returns the accepted result with the lowest stream position together with
/// the largest candidate size seen.
fn first_accepted<C, T>(
    stream: impl Iterator<Item = C>,
    size: impl Fn(&C) -> usize,
    eval: impl Fn(&C) -> Option<T> + Sync,
) -> (Option<T>, usize)
where
    C: Send + Sync,
    T: Send,
{
    let mut stream = stream.peekable();
    let mut largest = 0;
    while stream.peek().is_some() {
        let batch: Vec<C> = stream.by_ref().take(BATCH).collect();
        largest = batch.iter().map(&size).fold(largest, usize::max);
        let hit = batch
            .par_iter()
            .map(|c| eval(c))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .next();
        if hit.is_some() {
            return (hit, largest);
        }
    }
    (None, largest)
}

fn column_candidates(
    n: usize,
    cap: usize,
    cfg: &SolveConfig,
    planted: &[UniformCombination],
) -> Box<dyn Iterator<Item = UniformCombination> + Send> {
    let planted = planted.to_vec().into_iter();
    if cfg.randomized_mode {
        let seed = cfg.seed;
        let sampled = (0..cfg.random_draws).map(move |t| {
            let mut rng = seed.stream(t as u64);
            let size = t % cap + 1;
            let idx = (0..size).map(|_| rng.random_range(0..n)).collect();
            UniformCombination::new(idx).expect("nonempty")
        });
        Box::new(planted.chain(sampled))
    } else {
        Box::new(planted.chain(enumerate_uniform(n, cap)))
    }
}

fn check_planted(planted: &[UniformCombination], n: usize) -> Result<()> {
    for c in planted {
        if let Some(&i) = c.indices().iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
    }
    Ok(())
}

/// Equilibrium search by enumeration of uniform combinations `u` of columns of
/// `C`, solving CP(u) for each. Candidates are the planted witnesses followed
/// by the enumeration (or the random draws).
pub fn solve_sparse_nash_with_witnesses(
    g: &BimatrixGame,
    cfg: &SolveConfig,
    planted: &[UniformCombination],
) -> Result<EquilibriumCertificate> {
    cfg.validate()?;
    check_planted(planted, g.n())?;
    let sp = sparsity(g);
    let norm = match cfg.norm_mode {
        NormMode::InfLp => NormSpec::Inf,
        NormMode::PNorm => NormSpec::P(sp.p),
    };
    let cap = cfg.multiset_cap(sp.p);
    let threshold = cfg.eps / 2.0;
    let stream = column_candidates(g.n(), cap, cfg, planted);
    let (hit, largest) = first_accepted(stream, UniformCombination::len, |u| {
        try_column_candidate(g, cfg, u, norm, threshold, None)
    });
    hit.ok_or(Error::Exhausted { largest_size: largest })
}

pub fn solve_sparse_nash(g: &BimatrixGame, cfg: &SolveConfig) -> Result<EquilibriumCertificate> {
    solve_sparse_nash_with_witnesses(g, cfg, &[])
}

/// Variant for games promised to have an equilibrium with every probability
/// at most `1/m`: `p = max(2 log₂(s/m), 2)`, the cap `‖x‖_q ≤ m^{−1/p}` and
/// the acceptance threshold `ε·m^{1/p}/2`.
pub fn solve_small_prob_with_witnesses(
    g: &BimatrixGame,
    m: usize,
    cfg: &SolveConfig,
    planted: &[UniformCombination],
) -> Result<EquilibriumCertificate> {
    cfg.validate()?;
    check_planted(planted, g.n())?;
    if m == 0 || m > g.n() {
        return Err(Error::invalid("m", format!("must lie in [1, {}], got {m}", g.n())));
    }
    let s = sparsity(g).s as f64;
    let mf = m as f64;
    let p = small_prob_exponent(s, mf);
    let q = p / (p - 1.0);
    let x_cap = (q, mf.powf(-1.0 / p));
    let threshold = cfg.eps * mf.powf(1.0 / p) / 2.0;
    let cap = cfg.multiset_cap(p);
    let stream = column_candidates(g.n(), cap, cfg, planted);
    let (hit, largest) = first_accepted(stream, UniformCombination::len, |u| {
        try_column_candidate(g, cfg, u, NormSpec::P(p), threshold, Some(x_cap))
    });
    hit.ok_or(Error::Exhausted { largest_size: largest })
}

pub fn solve_small_prob(g: &BimatrixGame, m: usize, cfg: &SolveConfig) -> Result<EquilibriumCertificate> {
    solve_small_prob_with_witnesses(g, m, cfg, &[])
}

fn try_column_candidate(
    g: &BimatrixGame,
    cfg: &SolveConfig,
    comb: &UniformCombination,
    norm: NormSpec,
    threshold: f64,
    x_cap: Option<(f64, f64)>,
) -> Option<EquilibriumCertificate> {
    let u = Vector::new(comb.column_average(&g.c)).ok()?;
    let mut inst = CpInstance::new(g.c.clone(), u.clone(), g.a.clone(), g.b.clone(), cfg.eps, norm);
    inst.welfare_floor = cfg.welfare_floor;
    inst.x_norm_cap = x_cap;
    inst.decision_threshold = Some(threshold);
    let sol = solve_cp(&inst).ok()?;
    if !(sol.residual < threshold - SOLVE_TOL) {
        return None;
    }
    let q = x_cap.map_or(norm.conjugate(), |c| c.0);
    let r: Vec<f64> = g.c.mul_vec(&sol.y).iter().zip(u.iter()).map(|(a, b)| a - b).collect();
    let holder = dot(&sol.x, &r).abs();
    assert!(
        holder <= norm_with_exponent(&sol.x, q) * sol.residual * (1.0 + 1e-9) + 1e-12,
        "Hölder bound violated: {holder} > ‖x‖_q·{}",
        sol.residual
    );
    certify(g, cfg, sol, Some(comb.clone()), None)
}

/// Builds the certificate from a CP solution after recomputing regrets; `None`
/// when the recomputed regrets exceed ε.
fn certify(
    g: &BimatrixGame,
    cfg: &SolveConfig,
    sol: CpSolution,
    u_used: Option<UniformCombination>,
    w_used: Option<UniformCombination>,
) -> Option<EquilibriumCertificate> {
    let profile = MixedProfile::new(sol.x.into_inner(), sol.y.into_inner()).ok()?;
    let mut cert = verify_eps_nash(g, &profile).ok()?;
    if cert.max_regret() > cfg.eps {
        return None;
    }
    cert.pi1 = sol.pi1;
    cert.pi2 = sol.pi2;
    cert.u_used = u_used;
    cert.w_used = w_used;
    cert.residual = Some(sol.residual);
    Some(cert)
}

/// Variant enumerating pairs `(v, w)`: `v` a uniform combination of columns of
/// `A`, `w` of rows of `B`. The program minimizes `‖Ay − v‖_∞ + ‖Bᵀx − w‖_∞`
/// under the bilinear-program constraints and `xᵀv + wᵀy ≥ π₁ + π₂ − ε/2`.
pub fn solve_both_sparse_with_witnesses(
    g: &BimatrixGame,
    cfg: &SolveConfig,
    planted: &[(UniformCombination, UniformCombination)],
) -> Result<EquilibriumCertificate> {
    cfg.validate()?;
    let n = g.n();
    for (v, w) in planted {
        check_planted(std::slice::from_ref(v), n)?;
        check_planted(std::slice::from_ref(w), n)?;
    }
    let bt = g.b.transpose();
    let s = g
        .a
        .columns()
        .iter()
        .chain(bt.columns().iter())
        .map(|c| l0_count(c))
        .max()
        .unwrap_or(0)
        .max(4);
    let cap = cfg.multiset_cap((s as f64).log2());
    let stream = planted.to_vec().into_iter().chain(pair_stream(n, cap));
    let (hit, largest) = first_accepted(
        stream,
        |(v, w)| v.len().max(w.len()),
        |(v, w)| try_pair_candidate(g, &bt, cfg, v, w),
    );
    hit.ok_or(Error::Exhausted { largest_size: largest })
}

pub fn solve_both_sparse(g: &BimatrixGame, cfg: &SolveConfig) -> Result<EquilibriumCertificate> {
    solve_both_sparse_with_witnesses(g, cfg, &[])
}

/// Pairs of multisets ordered by the larger size, then by `(|v|, |w|)`.
fn pair_stream(n: usize, cap: usize) -> impl Iterator<Item = (UniformCombination, UniformCombination)> + Send {
    (1..=cap).flat_map(move |level| {
        let mut sizes: Vec<(usize, usize)> = (1..=level)
            .map(|k| (level, k))
            .chain((1..level).map(|k| (k, level)))
            .collect();
        sizes.sort();
        sizes.into_iter().flat_map(move |(kv, kw)| {
            enumerate_size(n, kv).flat_map(move |v| enumerate_size(n, kw).map(move |w| (v.clone(), w)))
        })
    })
}

fn try_pair_candidate(
    g: &BimatrixGame,
    bt: &Matrix,
    cfg: &SolveConfig,
    vc: &UniformCombination,
    wc: &UniformCombination,
) -> Option<EquilibriumCertificate> {
    let n = g.n();
    let v = vc.column_average(&g.a);
    let w = wc.column_average(bt);
    let (ix, iy, ip1, ip2, it1, it2) = (0, n, 2 * n, 2 * n + 1, 2 * n + 2, 2 * n + 3);
    let dim = it2 + 1;
    let mut poly = Polytope::new(dim);
    poly.set_bounds(ip1, Some(-1.0), Some(1.0));
    poly.set_bounds(ip2, Some(-1.0), Some(1.0));
    poly.add_sparse_eq(&(ix..ix + n).map(|j| (j, 1.0)).collect::<Vec<_>>(), 1.0);
    poly.add_sparse_eq(&(iy..iy + n).map(|j| (j, 1.0)).collect::<Vec<_>>(), 1.0);
    for i in 0..n {
        let ay: Vec<(usize, f64)> = (0..n).map(|j| (iy + j, g.a[(i, j)])).collect();
        let bx: Vec<(usize, f64)> = (0..n).map(|j| (ix + j, g.b[(j, i)])).collect();
        let with = |terms: &[(usize, f64)], extra: (usize, f64)| {
            let mut t = terms.to_vec();
            t.push(extra);
            t
        };
        let neg = |terms: &[(usize, f64)]| terms.iter().map(|&(k, c)| (k, -c)).collect::<Vec<_>>();
        poly.add_sparse_le(&with(&ay, (ip1, -1.0)), 0.0);
        poly.add_sparse_le(&with(&bx, (ip2, -1.0)), 0.0);
        poly.add_sparse_le(&with(&ay, (it1, -1.0)), v[i]);
        poly.add_sparse_le(&with(&neg(&ay), (it1, -1.0)), -v[i]);
        poly.add_sparse_le(&with(&bx, (it2, -1.0)), w[i]);
        poly.add_sparse_le(&with(&neg(&bx), (it2, -1.0)), -w[i]);
    }
    let mut payoff: Vec<(usize, f64)> = (0..n).map(|i| (ix + i, -v[i])).collect();
    payoff.extend((0..n).map(|j| (iy + j, -w[j])));
    payoff.extend([(ip1, 1.0), (ip2, 1.0)]);
    poly.add_sparse_le(&payoff, cfg.eps / 2.0);
    if let Some(alpha) = cfg.welfare_floor {
        poly.add_sparse_ge(&[(ip1, 1.0), (ip2, 1.0)], alpha);
    }
    let mut objective = vec![0.0; dim];
    objective[it1] = 1.0;
    objective[it2] = 1.0;
    let sol = solve_lp(&objective, &poly);
    if !sol.is_optimal() {
        return None;
    }
    let x = simplex_repair(&sol.point[ix..ix + n]);
    let y = simplex_repair(&sol.point[iy..iy + n]);
    let diff = |a: Vec<f64>, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p - q).collect() };
    let residual =
        NormSpec::Inf.norm(&diff(g.a.mul_vec(&y), &v)) + NormSpec::Inf.norm(&diff(g.b.vec_mul(&x), &w));
    if !(residual < cfg.eps / 2.0 - SOLVE_TOL) {
        return None;
    }
    let mut pi1 = max_entry(&g.a.mul_vec(&y)).max(-1.0);
    let mut pi2 = max_entry(&g.b.vec_mul(&x)).max(-1.0);
    if let Some(alpha) = cfg.welfare_floor {
        let short = alpha - pi1 - pi2;
        if short > 0.0 {
            let r1 = short.min(1.0 - pi1);
            pi1 += r1;
            pi2 = (pi2 + short - r1).min(1.0);
        }
    }
    let cp = CpSolution {
        x: Vector::new(x).ok()?,
        y: Vector::new(y).ok()?,
        pi1,
        pi2,
        residual,
    };
    certify(g, cfg, cp, Some(vc.clone()), Some(wc.clone()))
}

/// Largest grid value `α = −2 + kε/4` for which the search with welfare floor
/// `α` succeeds, found by binary search, and its certificate.
pub fn solve_max_welfare(g: &BimatrixGame, cfg: &SolveConfig) -> Result<(EquilibriumCertificate, f64)> {
    cfg.validate()?;
    let step = cfg.eps / 4.0;
    let steps = (4.0 / step + 1e-9).floor() as usize;
    let alpha = |k: usize| -2.0 + k as f64 * step;
    let attempt = |k: usize| -> Result<Option<EquilibriumCertificate>> {
        let probe = SolveConfig {
            welfare_floor: Some(alpha(k)),
            ..cfg.clone()
        };
        match solve_sparse_nash(g, &probe) {
            Ok(c) => Ok(Some(c)),
            Err(Error::Exhausted { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let Some(mut best) = attempt(0)? else {
        return Err(Error::Exhausted {
            largest_size: cfg.multiset_cap(sparsity(g).p),
        });
    };
    let (mut lo, mut hi) = (0usize, steps + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match attempt(mid)? {
            Some(c) => {
                lo = mid;
                best = c;
            }
            None => hi = mid,
        }
    }
    Ok((best, alpha(lo)))
}

/// Uniform combination of columns of `C` within `ε/2` of `Cŷ` in the p-norm
/// of the game's sparsity, drawn by the sampling sparsifier. Used to seed the
/// search with a witness for the equilibrium column strategy `ŷ`.
pub fn planted_witness(g: &BimatrixGame, y_hat: &[f64], eps: f64, seed: RngSeed) -> Result<UniformCombination> {
    let points = PointSet::from_rows(g.c.columns())?;
    let norm = NormSpec::P(sparsity(g).p);
    let req = SparsifyRequest::new(points, simplex_repair(y_hat), eps / 4.0, norm)?;
    Ok(sparsify(&req, seed)?.combination)
}
