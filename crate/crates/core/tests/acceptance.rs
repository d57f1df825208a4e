//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparse_carath::caratheodory::{khintchine_check, sample_count, sparsify, SparsifyRequest};
use sparse_carath::geometry::{
    approx_bvn, birkhoff_decompose, find_rainbow, find_tverberg_partition, ColorClasses, DoublyStochastic,
    TverbergInstance,
};
use sparse_carath::linalg::{Matrix, NormSpec, PointSet, RngSeed, Vector};
use sparse_carath::lower_bound::{best_k_uniform_distance, verify_lower_bound, LowerBoundCase};
use sparse_carath::nash::{
    bp_objective, exact_nash_oracle, planted_witness, small_prob_exponent, solve_both_sparse, solve_max_welfare,
    solve_small_prob, solve_small_prob_with_witnesses, solve_sparse_nash, solve_sparse_nash_with_witnesses,
    verify_eps_nash, BimatrixGame, EquilibriumCertificate, MixedProfile, NormMode, SolveConfig,
};
use sparse_carath::subgraph::{
    dkbs_bruteforce, linearization_ascent, ndks_bruteforce, qp_value, round_to_uniform_exact, solve_dkbs, solve_ndks,
    Graph, NdksInstance, SubgraphConfig,
};
use sparse_carath::Error;

type Outcome = std::result::Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Point sets and sampling

fn ball_point(r: &mut ChaCha8Rng, d: usize, norm: NormSpec) -> Vector {
    let v: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
    let scale = r.random_range(0.5..1.0) / norm.norm(&v);
    Vector::new(v.iter().map(|x| x * scale).collect()).unwrap()
}

fn random_weights(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| r.random::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

fn sparsifier_bound() -> Outcome {
    let eps = 0.3;
    let mut worst_mean: f64 = 0.0;
    let mut worst_rate: f64 = 1.0;
    for set in 0..20u64 {
        let d = [50, 500][set as usize % 2];
        let n = [20, 100][(set as usize / 2) % 2];
        let p = [2.0, 4.0, (d as f64).log2()][(set as usize / 4) % 3];
        let norm = NormSpec::p(p).unwrap();
        let mut r = rng(1000 + set);
        let points = PointSet::new((0..n).map(|_| ball_point(&mut r, d, norm)).collect()).unwrap();
        let weights = random_weights(&mut r, n);
        let req = SparsifyRequest::new(points.clone(), weights, eps, norm).unwrap().with_retries(1);
        let m = sample_count(p, points.gamma(norm), eps).unwrap();
        let mut total = 0.0;
        let mut hits = 0;
        for seed in 0..200 {
            let res = sparsify(&req, RngSeed(seed)).unwrap();
            check(res.sample_count_m == m && res.combination.len() == m, || format!("set {set}: sample count"))?;
            total += res.achieved_distance;
            hits += usize::from(res.achieved_distance <= 2.0 * eps);
        }
        let mean = total / 200.0;
        let rate = hits as f64 / 200.0;
        worst_mean = worst_mean.max(mean);
        worst_rate = worst_rate.min(rate);
        check(mean <= 1.1 * eps, || format!("set {set} (d={d}, n={n}, p={p:.3}): mean {mean:.4}"))?;
        check(rate >= 0.4, || format!("set {set}: Pr[<= 2 eps] = {rate}"))?;
    }
    Ok(format!("worst mean {worst_mean:.4} <= {:.3}, worst Pr[<= 2 eps] {worst_rate:.3}", 1.1 * eps))
}

fn khintchine() -> Outcome {
    let mut worst: f64 = 0.0;
    for fam in 0..50u64 {
        let mut r = rng(2000 + fam);
        let p = [2.0, 3.0, 4.0, 6.0, 8.0][fam as usize % 5];
        let d = r.random_range(2..=40);
        let count = r.random_range(2..=30);
        let vectors: Vec<Vector> = (0..count)
            .map(|_| Vector::new((0..d).map(|_| r.random_range(-1.0..1.0)).collect()).unwrap())
            .collect();
        let (lhs, rhs) = khintchine_check(&vectors, NormSpec::p(p).unwrap(), 10_000, RngSeed(fam)).unwrap();
        worst = worst.max(lhs / rhs);
        check(lhs <= 1.02 * rhs, || format!("family {fam}: {lhs} > 1.02 * {rhs}"))?;
    }
    Ok(format!("max ratio lhs/rhs {worst:.4}"))
}

// ---------------------------------------------------------------------------
// Games

struct CorpusGame {
    game: BimatrixGame,
    eps: f64,
    equilibria: Vec<MixedProfile>,
}

/// Payoffs on the grid `k/4` with about a third of the entries zero.
fn game_corpus() -> Vec<CorpusGame> {
    (0..500u64)
        .map(|i| {
            let mut r = rng(3000 + i);
            let n = 2 + (i as usize % 3);
            let entry = |r: &mut ChaCha8Rng| {
                if r.random::<f64>() < 0.33 {
                    0.0
                } else {
                    r.random_range(-4i32..=4) as f64 / 4.0
                }
            };
            let a: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| entry(&mut r)).collect()).collect();
            let b: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| entry(&mut r)).collect()).collect();
            let game = BimatrixGame::from_rows(a, b).unwrap();
            let equilibria = exact_nash_oracle(&game).unwrap();
            CorpusGame {
                game,
                eps: [0.1, 0.25][(i as usize / 3) % 2],
                equilibria,
            }
        })
        .collect()
}

fn regret_ok(g: &BimatrixGame, c: &EquilibriumCertificate, eps: f64) -> bool {
    let again = verify_eps_nash(g, &c.profile).unwrap();
    again.max_regret() <= eps + 1e-7
}

fn planted_for(cg: &CorpusGame, seed: u64) -> Vec<sparse_carath::linalg::UniformCombination> {
    let y_hat = cg.equilibria[0].y.as_slice();
    vec![planted_witness(&cg.game, y_hat, cg.eps, RngSeed(seed)).unwrap()]
}

fn nash_soundness(corpus: &[CorpusGame]) -> Outcome {
    let mut certificates = 0;
    for (i, cg) in corpus.iter().enumerate() {
        let g = &cg.game;
        let eps = cg.eps;
        let mut paths: Vec<(&str, sparse_carath::Result<EquilibriumCertificate>)> = vec![
            ("inf", solve_sparse_nash_with_witnesses(g, &SolveConfig::new(eps).with_cap(2), &planted_for(cg, i as u64))),
            (
                "pnorm",
                solve_sparse_nash(
                    g,
                    &SolveConfig {
                        norm_mode: NormMode::PNorm,
                        ..SolveConfig::new(eps).with_cap(1)
                    },
                ),
            ),
            (
                "randomized",
                solve_sparse_nash(
                    g,
                    &SolveConfig {
                        randomized_mode: true,
                        random_draws: 40,
                        seed: RngSeed(i as u64),
                        ..SolveConfig::new(eps).with_cap(3)
                    },
                ),
            ),
            ("both-sparse", solve_both_sparse(g, &SolveConfig::new(eps).with_cap(1))),
            ("small-prob", solve_small_prob(g, 1, &SolveConfig::new(eps).with_cap(1))),
        ];
        if i % 10 == 0 {
            paths.push(("welfare", solve_max_welfare(g, &SolveConfig::new(eps).with_cap(1)).map(|(c, _)| c)));
        }
        for (name, res) in paths {
            match res {
                Ok(c) => {
                    certificates += 1;
                    check(regret_ok(g, &c, eps), || format!("game {i}, path {name}: regret {}", c.max_regret()))?;
                }
                Err(Error::Exhausted { .. }) => {}
                Err(e) => return Err(format!("game {i}, path {name}: {e}")),
            }
        }
    }
    Ok(format!("{certificates} certificates over {} games, all regrets <= eps + 1e-7", corpus.len()))
}

fn nash_completeness(corpus: &[CorpusGame]) -> Outcome {
    for (i, cg) in corpus.iter().enumerate() {
        let cfg = SolveConfig::new(cg.eps).with_cap(2);
        match solve_sparse_nash_with_witnesses(&cg.game, &cfg, &planted_for(cg, i as u64)) {
            Ok(c) => check(regret_ok(&cg.game, &c, cg.eps), || format!("game {i}: unsound certificate"))?,
            Err(e) => return Err(format!("game {i}: {e}")),
        }
    }
    Ok(format!("{} of {} games certified", corpus.len(), corpus.len()))
}

fn bilinear_equivalence(corpus: &[CorpusGame]) -> Outcome {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for (i, cg) in corpus.iter().enumerate() {
        let g = &cg.game;
        for eq in &cg.equilibria {
            let pi1 = g.a.mul_vec(&eq.y).into_iter().fold(f64::NEG_INFINITY, f64::max);
            let pi2 = g.b.vec_mul(&eq.x).into_iter().fold(f64::NEG_INFINITY, f64::max);
            let v = bp_objective(g, eq, pi1, pi2).map_err(|e| format!("game {i}: {e}"))?;
            worst = worst.max(v.abs());
            check(v.abs() <= 1e-9, || format!("game {i}: objective {v:e}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} equilibria, max |objective| {worst:e}"))
}

fn circulant(r: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let first: Vec<f64> = (0..n).map(|_| r.random_range(-4i32..=4) as f64 / 4.0).collect();
    (0..n).map(|i| (0..n).map(|j| first[(j + n - i) % n]).collect()).collect()
}

fn small_probability() -> Outcome {
    let mut grid = 0;
    for ls in 2..=12i32 {
        for lm in 0..=ls {
            let want = (2 * (ls - lm)).max(2) as f64;
            let got = small_prob_exponent(2f64.powi(ls), 2f64.powi(lm));
            check(got == want, || format!("s=2^{ls}, m=2^{lm}: {got} != {want}"))?;
            grid += 1;
        }
    }
    for (s, m) in [(12.0, 1.0), (20.0, 3.0), (100.0, 7.0)] {
        let want: f64 = (2.0 * f64::log2(s / m)).max(2.0);
        check(small_prob_exponent(s, m) == want, || format!("s={s}, m={m}"))?;
    }
    // Circulant payoffs have constant row and column sums, so the uniform
    // pair is an equilibrium with every probability equal to 1/n.
    let eps = 0.25;
    for i in 0..10u64 {
        let mut r = rng(6000 + i);
        let n = 3 + i as usize % 4;
        let g = BimatrixGame::from_rows(circulant(&mut r, n), circulant(&mut r, n)).unwrap();
        let uniform = vec![1.0 / n as f64; n];
        let w = planted_witness(&g, &uniform, eps, RngSeed(i)).unwrap();
        let c = solve_small_prob_with_witnesses(&g, n, &SolveConfig::new(eps).with_cap(2), &[w])
            .map_err(|e| format!("game {i} (n={n}): {e}"))?;
        check(regret_ok(&g, &c, eps), || format!("game {i}: regret {}", c.max_regret()))?;
    }
    Ok(format!("{grid} grid points exact; 10 uniform-equilibrium games solved"))
}

// ---------------------------------------------------------------------------
// Subgraphs

fn graph_corpus() -> Vec<(String, Graph, usize)> {
    let cycle = |n: usize| Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap();
    let random = |n: usize, prob: f64, seed: u64| {
        let mut r = rng(seed);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|_| r.random::<f64>() < prob)
            .collect();
        Graph::new(n, edges).unwrap()
    };
    let bipartite = Graph::new(7, (0..3).flat_map(|i| (3..7).map(move |j| (i, j)))).unwrap();
    vec![
        ("K6".into(), Graph::complete(6), 3),
        ("empty7".into(), Graph::empty(7), 2),
        ("path8".into(), Graph::path(8), 3),
        ("star9".into(), Graph::star(9), 4),
        ("petersen".into(), Graph::petersen(), 4),
        ("cycle9".into(), cycle(9), 3),
        ("K3,4".into(), bipartite, 4),
        ("gnp10".into(), random(10, 0.3, 71), 4),
        ("gnp11".into(), random(11, 0.4, 72), 5),
        ("gnp12".into(), random(12, 0.25, 73), 5),
    ]
}

/// Rational point of the capped simplex `{y ≥ 0, Σy = 1, y_i ≤ 1/k}`.
fn capped_rational(r: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<BigRational> {
    let den = 60i64;
    let total = den * k as i64;
    let mut a: Vec<i64> = (0..n).map(|_| r.random_range(0..=den)).collect();
    let mut sum: i64 = a.iter().sum();
    while sum != total {
        let i = r.random_range(0..n);
        if sum < total && a[i] < den {
            a[i] += 1;
            sum += 1;
        } else if sum > total && a[i] > 0 {
            a[i] -= 1;
            sum -= 1;
        }
    }
    let scale = BigInt::from(total);
    a.into_iter().map(|v| BigRational::new(BigInt::from(v), scale.clone())).collect()
}

fn exact_qp(g: &Graph, y: &[BigRational]) -> BigRational {
    // yᵀ(½A + I)y = Σ_edges y_i y_j + Σ y_i².
    let edges: BigRational = g.edges().iter().map(|&(i, j)| &y[i] * &y[j]).sum();
    let diag: BigRational = y.iter().map(|v| v * v).sum();
    edges + diag
}

fn rounding_to_vertices() -> Outcome {
    let mut total = 0;
    for (name, g, k) in graph_corpus() {
        let mut r = rng(7000 + g.n() as u64);
        let unit = BigRational::new(BigInt::one(), BigInt::from(k));
        for trial in 0..1000 {
            let y = capped_rational(&mut r, g.n(), k);
            let (z, iters) = round_to_uniform_exact(&g, k, &y).map_err(|e| format!("{name}: {e}"))?;
            check(z.iter().all(|v| v.is_zero() || *v == unit), || format!("{name} trial {trial}: not 0-or-1/k"))?;
            check(exact_qp(&g, &z) >= exact_qp(&g, &y), || format!("{name} trial {trial}: value decreased"))?;
            check(iters <= g.n(), || format!("{name} trial {trial}: {iters} iterations"))?;
            total += 1;
        }
    }
    Ok(format!("{total} roundings exact, nondecreasing, within n iterations"))
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn qp_optimum_identity() -> Outcome {
    let mut checked = 0;
    for (name, g, k) in graph_corpus() {
        if binomial(g.n(), k) > 10_000 {
            continue;
        }
        let inst = NdksInstance::new(g.clone(), k).unwrap();
        let brute = ndks_bruteforce(&inst).unwrap().density;
        let target = brute + 1.0 / k as f64;
        let solved = solve_ndks(&inst, &SubgraphConfig::new(0.25).with_cap(2)).unwrap();
        let mut best = solved.density + 1.0 / k as f64;
        let mut r = rng(8000 + g.n() as u64);
        for _ in 0..300 {
            let y = capped_rational(&mut r, g.n(), k);
            let (z, _) = round_to_uniform_exact(&g, k, &y).unwrap();
            let zf: Vec<f64> = z.iter().map(|v| num_traits::ToPrimitive::to_f64(v).unwrap()).collect();
            let rounded = qp_value(&inst, &zf).unwrap();
            check(rounded <= target + 1e-9, || format!("{name}: rounded value {rounded} above {target}"))?;
            let ascended = linearization_ascent(&inst, &zf, 2).unwrap();
            best = best.max(rounded).max(ascended.density + 1.0 / k as f64);
        }
        check((best - target).abs() <= 1e-9, || format!("{name}: best {best} vs {target}"))?;
        checked += 1;
    }
    Ok(format!("{checked} graphs: best rounded value = brute-force density + 1/k"))
}

fn subgraph_gap() -> Outcome {
    let eps = 0.25;
    let cfg = SubgraphConfig::new(eps).with_cap(2);
    let mut instances = 0;
    let mut worst: f64 = f64::NEG_INFINITY;
    for (name, g, _) in graph_corpus() {
        for k in 2..=5.min(g.n()) {
            let inst = NdksInstance::new(g.clone(), k).unwrap();
            let got = solve_ndks(&inst, &cfg).unwrap().density;
            let best = ndks_bruteforce(&inst).unwrap().density;
            worst = worst.max(best - got);
            check(got >= best - eps, || format!("{name} k={k}: ndks {got} < {best} - eps"))?;
            let got = solve_dkbs(&g, k, &cfg).unwrap().density;
            let best = dkbs_bruteforce(&g, k).unwrap().density;
            worst = worst.max(best - got);
            check(got >= best - eps, || format!("{name} k={k}: dkbs {got} < {best} - eps"))?;
            instances += 2;
        }
    }
    Ok(format!("{instances} instances, largest shortfall {worst:.4} <= {eps}"))
}

// ---------------------------------------------------------------------------
// Geometry and the lower bound

fn sinkhorn(r: &mut ChaCha8Rng, d: usize) -> DoublyStochastic {
    let mut m: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| r.random::<f64>() + 0.01).collect()).collect();
    for _ in 0..5000 {
        for row in m.iter_mut() {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        for c in 0..d {
            let s: f64 = m.iter().map(|row| row[c]).sum();
            m.iter_mut().for_each(|row| row[c] /= s);
        }
    }
    DoublyStochastic::new(Matrix::from_rows(m).unwrap()).unwrap()
}

/// Random mixture of a few random permutation matrices: sparse support.
fn permutation_mixture(r: &mut ChaCha8Rng, d: usize) -> DoublyStochastic {
    let count = r.random_range(2..=d.max(2));
    let weights = random_weights(r, count);
    let mut m = vec![vec![0.0; d]; d];
    for w in weights {
        let mut perm: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            perm.swap(i, r.random_range(0..=i));
        }
        for (row, &c) in perm.iter().enumerate() {
            m[row][c] += w;
        }
    }
    DoublyStochastic::new(Matrix::from_rows(m).unwrap()).unwrap()
}

fn uniform_ds(d: usize) -> DoublyStochastic {
    DoublyStochastic::new(Matrix::from_rows(vec![vec![1.0 / d as f64; d]; d]).unwrap()).unwrap()
}

fn birkhoff() -> Outcome {
    let mut cases = 0;
    let mut worst_err: f64 = 0.0;
    for d in [2usize, 3, 4, 6, 8, 12, 16] {
        for t in 0..4u64 {
            let mut r = rng(9000 + 10 * d as u64 + t);
            let ds = match t {
                0 => uniform_ds(d),
                1 => permutation_mixture(&mut r, d),
                _ => sinkhorn(&mut r, d),
            };
            let dec = birkhoff_decompose(&ds).map_err(|e| format!("d={d}: {e}"))?;
            let err = dec.max_error(ds.matrix());
            worst_err = worst_err.max(err);
            check(err <= 1e-9, || format!("d={d} case {t}: error {err:e}"))?;
            check(dec.perms.len() <= (d - 1) * (d - 1) + 1, || format!("d={d}: {} permutations", dec.perms.len()))?;
            check((dec.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9, || format!("d={d}: weights"))?;
            cases += 1;
        }
    }
    let mut rates = Vec::new();
    for (ds, eps, k_want) in [(uniform_ds(4), 0.5, None), (uniform_ds(16), 0.25, Some(1024))] {
        let mut hits = 0;
        for seed in 0..200 {
            let a = approx_bvn(&ds, eps, RngSeed(seed)).map_err(|e| e.to_string())?;
            if let Some(k) = k_want {
                check(a.k == k, || format!("k = {} != {k}", a.k))?;
            }
            check(a.decomposition.weights.iter().all(|&w| w == 1.0 / a.k as f64), || "weights not 1/k".into())?;
            hits += usize::from(a.max_error <= eps);
        }
        let rate = hits as f64 / 200.0;
        check(rate >= 0.4, || format!("d={}: success rate {rate}", ds.dim()))?;
        rates.push(rate);
    }
    Ok(format!("{cases} exact decompositions (max error {worst_err:e}); sampled success rates {rates:?}"))
}

/// Minimum over a 1/100 grid of weights on the first `k` basis vectors.
fn grid_distance(d: usize, k: usize, p: f64) -> f64 {
    let mut best = f64::INFINITY;
    let mut w = vec![0usize; k];
    fn rec(i: usize, left: usize, w: &mut [usize], d: usize, p: f64, best: &mut f64) {
        if i + 1 == w.len() {
            w[i] = left;
            let s: f64 = (0..d)
                .map(|c| {
                    let x = if c < w.len() { w[c] as f64 / 100.0 } else { 0.0 };
                    (x - 1.0 / d as f64).abs().powf(p)
                })
                .sum();
            *best = best.min(s.powf(1.0 / p));
            return;
        }
        for v in 0..=left {
            w[i] = v;
            rec(i + 1, left - v, w, d, p, best);
        }
    }
    rec(0, 100, &mut w, d, p, &mut best);
    best
}

fn lower_bound() -> Outcome {
    let mut cases = 0;
    for d in [16usize, 100, 1000] {
        for p in [2.0, 3.0, 4.0] {
            for eps in [0.05, 0.1, 0.25] {
                let Ok(case) = LowerBoundCase::new(d, p, eps) else { continue };
                let report = verify_lower_bound(&case).map_err(|e| e.to_string())?;
                check(report.pass, || format!("d={d}, p={p}, eps={eps} failed"))?;
                cases += 1;
            }
        }
    }
    for d in 2..=6 {
        for k in 1..=3.min(d) {
            for p in [2.0, 3.0, 4.0] {
                let exact = best_k_uniform_distance(d, k, p).unwrap();
                let grid = grid_distance(d, k, p);
                check(grid >= exact - 1e-12 && grid <= exact + 1e-2, || format!("d={d} k={k} p={p}: grid {grid} vs {exact}"))?;
            }
        }
    }
    let r = verify_lower_bound(&LowerBoundCase::new(100, 2.0, 0.1).unwrap()).unwrap();
    let min = r.min_distance().unwrap();
    check((min - 0.17795).abs() < 1e-5 && min > 0.1, || format!("d=100 minimum {min}"))?;
    Ok(format!("{cases} admissible cases pass; d=100, p=2, eps=0.1 minimum {min:.5}"))
}

fn planted_rainbow(r: &mut ChaCha8Rng, d: usize) -> ColorClasses {
    let mu: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
    let classes = (0..=d)
        .map(|_| {
            let m = r.random_range(1..=3);
            let mut rows: Vec<Vec<f64>> = (0..m).map(|_| (0..d).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
            let w: f64 = r.random_range(0.2..0.8);
            let centroid: Vec<f64> = (0..d).map(|c| rows.iter().map(|x| x[c]).sum::<f64>() / m as f64).collect();
            rows.push((0..d).map(|c| (mu[c] - w * centroid[c]) / (1.0 - w)).collect());
            PointSet::from_rows(rows).unwrap()
        })
        .collect();
    ColorClasses::new(classes, Vector::new(mu).unwrap()).unwrap()
}

fn rainbow_tverberg() -> Outcome {
    let eps = 0.05;
    let p2 = NormSpec::p(2.0).unwrap();
    for i in 0..60u64 {
        let mut r = rng(10_000 + i);
        let d = 1 + i as usize % 3;
        let cc = planted_rainbow(&mut r, d);
        let norm = if i % 2 == 0 { p2 } else { NormSpec::Inf };
        let found = find_rainbow(&cc, eps, norm).map_err(|e| format!("rainbow {i}: {e}"))?;
        check(found.distance <= eps, || format!("rainbow {i}: distance {}", found.distance))?;
    }
    let mut parts = 0;
    for i in 0..40u64 {
        let mut r = rng(11_000 + i);
        let (rr, d) = [(2, 1), (2, 2), (2, 3), (3, 2)][i as usize % 4];
        let n = (rr - 1) * (d + 1) + 1;
        let pts = PointSet::from_rows((0..n).map(|_| (0..d).map(|_| r.random::<f64>()).collect()).collect()).unwrap();
        let inst = TverbergInstance::new(pts, rr, 0.1, p2).unwrap();
        let t = find_tverberg_partition(&inst).map_err(|e| format!("tverberg {i}: {e}"))?;
        check(t.distance <= 0.1, || format!("tverberg {i}: distance {}", t.distance))?;
        parts += 1;
    }
    let line = TverbergInstance::new(PointSet::from_rows(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap(), 2, 0.1, p2).unwrap();
    let t = find_tverberg_partition(&line).map_err(|e| e.to_string())?;
    check(t.distance == 0.0 && t.parts == vec![vec![0, 2], vec![1]], || format!("line case {t:?}"))?;
    let square = PointSet::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
    let t = find_tverberg_partition(&TverbergInstance::new(square, 2, 0.1, p2).unwrap()).map_err(|e| e.to_string())?;
    check(t.distance <= 1e-12, || format!("square case distance {}", t.distance))?;
    Ok(format!("60 planted rainbows and {parts} Radon/Tverberg configurations within eps; canonical cases at distance 0"))
}

// ---------------------------------------------------------------------------

fn run(id: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let outcome = match (outcome, limit) {
        (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:.1?}, limit {l:?}")),
        (o, _) => o,
    };
    let ok = outcome.is_ok();
    let (status, detail) = match outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {id:>2} [{status}] {name} ({elapsed:.1?}): {detail}");
    ok
}

fn main() {
    let min = |m: u64| Some(Duration::from_secs(60 * m));
    let mut ok = true;
    ok &= run(1, "sparsifier sample bound", min(1), sparsifier_bound);
    ok &= run(2, "Rademacher average bound", min(1), khintchine);
    let corpus_start = Instant::now();
    let corpus = game_corpus();
    println!("game corpus: {} games, exact equilibria in {:.1?}", corpus.len(), corpus_start.elapsed());
    ok &= run(3, "equilibrium certificates are sound", None, || nash_soundness(&corpus));
    ok &= run(4, "planted-witness completeness", min(5), || nash_completeness(&corpus));
    ok &= run(5, "bilinear program vanishes at equilibria", None, || bilinear_equivalence(&corpus));
    ok &= run(6, "small-probability exponent and solver", None, small_probability);
    ok &= run(7, "rounding to 0-or-1/k points", None, rounding_to_vertices);
    ok &= run(8, "QP optimum equals density + 1/k", None, qp_optimum_identity);
    ok &= run(9, "densest subgraph additive gap", min(10), subgraph_gap);
    ok &= run(10, "Birkhoff decompositions", None, birkhoff);
    ok &= run(11, "basis-vector lower bound", None, lower_bound);
    ok &= run(12, "rainbow and Tverberg search", None, rainbow_tverberg);
    if !ok {
        std::process::exit(1);
    }
}
