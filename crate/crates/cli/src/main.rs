//! Command-line front end: JSON in, JSON out.
//!
//! Exit codes: 0 success, 1 invalid input, 2 search exhausted or nothing found.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use sparse_carath::caratheodory::{sparsify, sparsify_infinity, SparsifyRequest, DEFAULT_C_INF, DEFAULT_DELTA_FAIL, DEFAULT_MAX_RETRIES};
use sparse_carath::geometry::{
    approx_bvn, birkhoff_decompose, find_rainbow, find_tverberg_partition, ColorClasses, DoublyStochastic,
    TverbergInstance,
};
use sparse_carath::linalg::{NormSpec, PointSet, RngSeed, Vector};
use sparse_carath::lower_bound::{verify_lower_bound, LowerBoundCase};
use sparse_carath::nash::{
    exact_nash_oracle, solve_both_sparse, solve_max_welfare, solve_small_prob, solve_sparse_nash, verify_eps_nash,
    BimatrixGame, MixedProfile, NormMode, SolveConfig, DEFAULT_KAPPA,
};
use sparse_carath::subgraph::{
    dkbs_bruteforce, ndks_bruteforce, solve_dkbs, solve_ndks, Graph, NdksInstance, SubgraphConfig,
};
use sparse_carath::Error;

const THREADS_ENV: &str = "SPARSE_CARATH_THREADS";

#[derive(Parser, Debug)]
#[command(name = "sparse-carath", version, about = "Sparse convex combinations and the solvers built on them")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Approximation parameter.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Norm exponent (a number >= 2 or `inf`).
    #[arg(long = "p", global = true, value_parser = parse_norm)]
    p_override: Option<NormSpec>,
    /// Constant in the multiset-size cap `κp/ε²`.
    #[arg(long, global = true, default_value_t = DEFAULT_KAPPA)]
    kappa: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest multiset size to enumerate, below the theory cap.
    #[arg(long = "max-multiset", global = true)]
    max_multiset: Option<usize>,
    /// Residual norm for the equilibrium search: `inf` (linear program) or `p`.
    #[arg(long = "norm-mode", global = true, default_value = "inf", value_parser = ["inf", "p"])]
    norm_mode: String,
    /// Write the JSON result here instead of stdout.
    #[arg(long = "output", global = true)]
    output_path: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a uniform combination close to the target point.
    Sparsify {
        /// `{"points", "weights", "target"?, "norm"?, "eps"?, "max_retries"?}`
        #[arg(long)]
        input: PathBuf,
        /// Use the max-norm sampler with `2 ln(2n/δ)/ε²` samples.
        #[arg(long)]
        infinity: bool,
    },
    /// Approximate equilibria of bimatrix games.
    #[command(subcommand)]
    Nash(NashCommand),
    /// Densest k-subgraph.
    #[command(subcommand)]
    Ndks(SubgraphCommand),
    /// Densest k×k bipartite subgraph.
    #[command(subcommand)]
    Dkbs(SubgraphCommand),
    /// Birkhoff–von Neumann decompositions.
    #[command(subcommand)]
    Bvn(BvnCommand),
    /// Rainbow whose hull is close to a point.
    Rainbow {
        /// `{"classes": [[[..]]], "mu": [..]}`
        #[arg(long)]
        input: PathBuf,
    },
    /// Partition into parts with concurrently close hulls.
    Tverberg {
        /// `{"points": [[..]], "r": 2}`
        #[arg(long)]
        input: PathBuf,
    },
    /// Distances from the barycenter to few basis vectors.
    Lowerbound {
        #[arg(long)]
        d: usize,
    },
}

#[derive(Subcommand, Debug)]
enum NashCommand {
    Solve {
        #[arg(long)]
        game: PathBuf,
        /// Sample candidate multisets instead of enumerating them.
        #[arg(long)]
        randomized: bool,
        #[arg(long, default_value_t = sparse_carath::nash::DEFAULT_RANDOM_DRAWS)]
        draws: usize,
        /// Require row plus column payoff at least this value.
        #[arg(long = "welfare-floor", allow_hyphen_values = true)]
        welfare_floor: Option<f64>,
        /// Search for the largest attainable welfare floor.
        #[arg(long = "max-welfare")]
        max_welfare: bool,
    },
    Verify {
        #[arg(long)]
        game: PathBuf,
        /// Row strategy, e.g. `0.5,0.5`.
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    Oracle {
        #[arg(long)]
        game: PathBuf,
    },
    SmallProb {
        #[arg(long)]
        game: PathBuf,
        /// Every equilibrium probability is at most `1/m`.
        #[arg(long)]
        m: usize,
    },
    BothSparse {
        #[arg(long)]
        game: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum SubgraphCommand {
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
    Brute {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand, Debug)]
enum BvnCommand {
    Decompose {
        #[arg(long)]
        matrix: PathBuf,
    },
    Approx {
        #[arg(long)]
        matrix: PathBuf,
    },
}

fn parse_norm(s: &str) -> Result<NormSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    /// Bad input or a failed precondition.
    Input(String),
    /// The search finished without a result; the payload goes to the output.
    Search(serde_json::Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Exhausted { largest_size } => Failure::Search(json!({
                "status": "EXHAUSTED",
                "largest_size": largest_size,
            })),
            Error::NotFound(reason) => Failure::Search(json!({ "status": "NOT_FOUND", "reason": reason })),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Input(s)
    }
}

type Outcome = Result<(), Failure>;

impl RunConfig {
    fn eps(&self) -> Result<f64, Failure> {
        self.eps.ok_or_else(|| Failure::Input("missing required option `--eps`".into()))
    }

    fn norm_or(&self, fallback: Option<NormSpec>) -> Result<NormSpec, Failure> {
        self.p_override
            .or(fallback)
            .ok_or_else(|| Failure::Input("missing required option `--p`".into()))
    }

    fn out(&self) -> Option<&Path> {
        self.output_path.as_deref()
    }

    fn solve_config(&self) -> Result<SolveConfig, Failure> {
        Ok(SolveConfig {
            kappa: self.kappa,
            norm_mode: if self.norm_mode == "p" { NormMode::PNorm } else { NormMode::InfLp },
            max_multiset_size: self.max_multiset,
            seed: RngSeed(self.seed),
            ..SolveConfig::new(self.eps()?)
        })
    }

    fn subgraph_config(&self) -> Result<SubgraphConfig, Failure> {
        Ok(SubgraphConfig {
            kappa: self.kappa,
            max_multiset_size: self.max_multiset,
            ..SubgraphConfig::new(self.eps()?)
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SparsifyInput {
    points: PointSet,
    #[serde(default)]
    weights: Option<Vec<f64>>,
    #[serde(default)]
    target: Option<Vector>,
    #[serde(default)]
    norm: Option<NormSpec>,
    #[serde(default)]
    eps: Option<f64>,
    #[serde(default)]
    max_retries: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RainbowInput {
    classes: Vec<PointSet>,
    mu: Vector,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TverbergInput {
    points: PointSet,
    r: usize,
}

#[derive(Serialize)]
struct WelfareResult {
    certificate: sparse_carath::nash::EquilibriumCertificate,
    welfare_floor: f64,
}

fn parse_strategy(s: &str, field: &str) -> Result<Vec<f64>, Failure> {
    s.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Input(format!("invalid `--{field}`: cannot parse `{}` as a number", t.trim())))
        })
        .collect()
}

fn run_sparsify(cfg: &RunConfig, input: &Path, infinity: bool) -> Outcome {
    let raw: SparsifyInput = io::read_json(input, "sparsify input")?;
    let eps = cfg.eps.or(raw.eps).ok_or_else(|| Failure::Input("missing `eps` (option or input field)".into()))?;
    let norm = cfg.p_override.or(raw.norm).unwrap_or(if infinity { NormSpec::Inf } else { NormSpec::P(2.0) });
    let target = match (&raw.target, &raw.weights) {
        (Some(t), _) => t.clone(),
        (None, Some(w)) => Vector::new(raw.points.combine(w))?,
        (None, None) => return Err(Error::WeightsRequired.into()),
    };
    let req = SparsifyRequest {
        points: raw.points,
        target,
        weights: raw.weights,
        eps,
        norm,
        max_retries: raw.max_retries.unwrap_or(DEFAULT_MAX_RETRIES),
    };
    let seed = RngSeed(cfg.seed);
    let res = if infinity {
        sparsify_infinity(&req, seed, DEFAULT_C_INF, DEFAULT_DELTA_FAIL)?
    } else {
        sparsify(&req, seed)?
    };
    Ok(io::emit(&res, cfg.out())?)
}

fn run_nash(cfg: &RunConfig, cmd: &NashCommand) -> Outcome {
    let load = |p: &Path| -> Result<BimatrixGame, Failure> { Ok(io::read_json(p, "game")?) };
    match cmd {
        NashCommand::Solve {
            game,
            randomized,
            draws,
            welfare_floor,
            max_welfare,
        } => {
            let g = load(game)?;
            let sc = SolveConfig {
                randomized_mode: *randomized,
                random_draws: *draws,
                welfare_floor: *welfare_floor,
                ..cfg.solve_config()?
            };
            if *max_welfare {
                let (certificate, welfare_floor) = solve_max_welfare(&g, &sc)?;
                Ok(io::emit(&WelfareResult { certificate, welfare_floor }, cfg.out())?)
            } else {
                Ok(io::emit(&solve_sparse_nash(&g, &sc)?, cfg.out())?)
            }
        }
        NashCommand::Verify { game, x, y } => {
            let g = load(game)?;
            let prof = MixedProfile::new(parse_strategy(x, "x")?, parse_strategy(y, "y")?)?;
            Ok(io::emit(&verify_eps_nash(&g, &prof)?, cfg.out())?)
        }
        NashCommand::Oracle { game } => Ok(io::emit(&exact_nash_oracle(&load(game)?)?, cfg.out())?),
        NashCommand::SmallProb { game, m } => {
            let g = load(game)?;
            Ok(io::emit(&solve_small_prob(&g, *m, &cfg.solve_config()?)?, cfg.out())?)
        }
        NashCommand::BothSparse { game } => {
            let g = load(game)?;
            Ok(io::emit(&solve_both_sparse(&g, &cfg.solve_config()?)?, cfg.out())?)
        }
    }
}

fn run_subgraph(cfg: &RunConfig, cmd: &SubgraphCommand, bipartite: bool) -> Outcome {
    let (graph, k, brute) = match cmd {
        SubgraphCommand::Solve { graph, k } => (graph, *k, false),
        SubgraphCommand::Brute { graph, k } => (graph, *k, true),
    };
    let g: Graph = io::read_json(graph, "graph")?;
    if bipartite {
        let res = if brute { dkbs_bruteforce(&g, k)? } else { solve_dkbs(&g, k, &cfg.subgraph_config()?)? };
        Ok(io::emit(&res, cfg.out())?)
    } else {
        let inst = NdksInstance::new(g, k)?;
        let res = if brute { ndks_bruteforce(&inst)? } else { solve_ndks(&inst, &cfg.subgraph_config()?)? };
        Ok(io::emit(&res, cfg.out())?)
    }
}

fn run_bvn(cfg: &RunConfig, cmd: &BvnCommand) -> Outcome {
    match cmd {
        BvnCommand::Decompose { matrix } => {
            let d: DoublyStochastic = io::read_json(matrix, "matrix")?;
            Ok(io::emit(&birkhoff_decompose(&d)?, cfg.out())?)
        }
        BvnCommand::Approx { matrix } => {
            let d: DoublyStochastic = io::read_json(matrix, "matrix")?;
            Ok(io::emit(&approx_bvn(&d, cfg.eps()?, RngSeed(cfg.seed))?, cfg.out())?)
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let cfg = &cli.run;
    match &cli.command {
        Command::Sparsify { input, infinity } => run_sparsify(cfg, input, *infinity),
        Command::Nash(cmd) => run_nash(cfg, cmd),
        Command::Ndks(cmd) => run_subgraph(cfg, cmd, false),
        Command::Dkbs(cmd) => run_subgraph(cfg, cmd, true),
        Command::Bvn(cmd) => run_bvn(cfg, cmd),
        Command::Rainbow { input } => {
            let raw: RainbowInput = io::read_json(input, "rainbow input")?;
            let cc = ColorClasses::new(raw.classes, raw.mu)?;
            Ok(io::emit(&find_rainbow(&cc, cfg.eps()?, cfg.norm_or(Some(NormSpec::P(2.0)))?)?, cfg.out())?)
        }
        Command::Tverberg { input } => {
            let raw: TverbergInput = io::read_json(input, "tverberg input")?;
            let inst = TverbergInstance::new(raw.points, raw.r, cfg.eps()?, cfg.norm_or(Some(NormSpec::P(2.0)))?)?;
            Ok(io::emit(&find_tverberg_partition(&inst)?, cfg.out())?)
        }
        Command::Lowerbound { d } => {
            let NormSpec::P(p) = cfg.norm_or(None)? else {
                return Err(Failure::Input("invalid `--p`: the lower bound needs a finite exponent".into()));
            };
            let report = verify_lower_bound(&LowerBoundCase::new(*d, p, cfg.eps()?)?)?;
            io::emit(&report, cfg.out())?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Search(json!({ "status": "FAIL" })))
            }
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("invalid {THREADS_ENV}: expected a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("cannot configure {n} threads: {e}"))
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    eprintln!("sparse-carath {}", env!("CARGO_PKG_VERSION"));
    if let Err(e) = configure_threads() {
        eprintln!("error: {}", one_line(&e));
        return ExitCode::from(1);
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {}", one_line(&msg));
            ExitCode::from(1)
        }
        Err(Failure::Search(payload)) => {
            // The pass/fail report of `lowerbound` is already written.
            if payload["status"] != "FAIL" {
                if let Err(e) = io::emit(&payload, cli.run.out()) {
                    eprintln!("error: {}", one_line(&e));
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(2)
        }
    }
}
