//! Additive ε-Nash equilibria of sparse bimatrix games by enumeration of
//! uniform combinations of payoff columns, with the small-probability,
//! both-sparse and welfare variants and an exact support-enumeration referee.

mod game;
mod oracle;
mod solve;

pub use game::{
    bp_objective, normalize_scaled_game, sparsity, verify_eps_nash, BimatrixGame, EquilibriumCertificate,
    MixedProfile, SparsityInfo,
};
pub use oracle::{exact_equilibria, exact_nash_oracle, ExactEquilibrium, ORACLE_MAX_N};
pub use solve::{
    planted_witness, small_prob_exponent, solve_both_sparse, solve_both_sparse_with_witnesses, solve_max_welfare,
    solve_small_prob, solve_small_prob_with_witnesses, solve_sparse_nash, solve_sparse_nash_with_witnesses,
    NormMode, SolveConfig, DEFAULT_KAPPA, DEFAULT_RANDOM_DRAWS,
};
