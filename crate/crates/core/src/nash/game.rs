use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, in_simplex, l0_count, max_entry, Matrix, UniformCombination, Vector};
use crate::lp::FEAS_TOL;

/// Two-player game with payoffs normalized into `[−1, 1]`; `C = A + B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameRepr", into = "GameRepr")]
pub struct BimatrixGame {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

#[derive(Serialize, Deserialize)]
struct GameRepr {
    #[serde(rename = "A")]
    a: Matrix,
    #[serde(rename = "B")]
    b: Matrix,
}

impl TryFrom<GameRepr> for BimatrixGame {
    type Error = Error;
    fn try_from(r: GameRepr) -> Result<Self> {
        BimatrixGame::new(r.a, r.b)
    }
}

impl From<BimatrixGame> for GameRepr {
    fn from(g: BimatrixGame) -> Self {
        GameRepr { a: g.a, b: g.b }
    }
}

impl BimatrixGame {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::invalid("A", "payoff matrix must be square"));
        }
        if a.rows() != b.rows() || a.cols() != b.cols() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, B is {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        check_unit_range("A", &a)?;
        check_unit_range("B", &b)?;
        let c = a.add(&b)?;
        Ok(BimatrixGame { a, b, c })
    }

    pub fn from_rows(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> Result<Self> {
        BimatrixGame::new(Matrix::from_rows(a)?, Matrix::from_rows(b)?)
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }
}

fn check_unit_range(field: &'static str, m: &Matrix) -> Result<()> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m[(i, j)];
            if v.abs() > 1.0 {
                return Err(Error::invalid(field, format!("entry [{i}][{j}] = {v} lies outside [-1, 1]")));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsityInfo {
    pub s: usize,
    pub p: f64,
}

/// `s = max(max_i ‖C^i‖₀, 4)` over the columns of `C`, `p = log₂ s`.
pub fn sparsity(g: &BimatrixGame) -> SparsityInfo {
    let s = g
        .c
        .columns()
        .iter()
        .map(|col| l0_count(col))
        .max()
        .unwrap_or(0)
        .max(4);
    SparsityInfo {
        s,
        p: (s as f64).log2(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr")]
pub struct MixedProfile {
    pub x: Vector,
    pub y: Vector,
}

#[derive(Deserialize)]
struct ProfileRepr {
    x: Vector,
    y: Vector,
}

impl TryFrom<ProfileRepr> for MixedProfile {
    type Error = Error;
    fn try_from(r: ProfileRepr) -> Result<Self> {
        MixedProfile::new(r.x.into_inner(), r.y.into_inner())
    }
}

impl MixedProfile {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if !in_simplex(&x, FEAS_TOL) {
            return Err(Error::invalid("x", "not a probability vector"));
        }
        if !in_simplex(&y, FEAS_TOL) {
            return Err(Error::invalid("y", "not a probability vector"));
        }
        Ok(MixedProfile {
            x: Vector::new(x)?,
            y: Vector::new(y)?,
        })
    }

    fn check_dims(&self, n: usize) -> Result<()> {
        if self.x.dim() != n || self.y.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "profile has dimensions ({}, {}), game has {n} strategies",
                self.x.dim(),
                self.y.dim()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub profile: MixedProfile,
    pub row_regret: f64,
    pub col_regret: f64,
    pub pi1: f64,
    pub pi2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_used: Option<UniformCombination>,
    /// Combination of rows of `B` used by the both-sparse search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_used: Option<UniformCombination>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl EquilibriumCertificate {
    pub fn max_regret(&self) -> f64 {
        self.row_regret.max(self.col_regret)
    }
}

/// Regrets of both players; `π₁`, `π₂` are set to the best-response payoffs.
pub fn verify_eps_nash(g: &BimatrixGame, prof: &MixedProfile) -> Result<EquilibriumCertificate> {
    prof.check_dims(g.n())?;
    let ay = g.a.mul_vec(&prof.y);
    let xb = g.b.vec_mul(&prof.x);
    let best_row = max_entry(&ay);
    let best_col = max_entry(&xb);
    Ok(EquilibriumCertificate {
        profile: prof.clone(),
        row_regret: (best_row - dot(&prof.x, &ay)).max(0.0),
        col_regret: (best_col - dot(&xb, &prof.y)).max(0.0),
        pi1: best_row,
        pi2: best_col,
        u_used: None,
        w_used: None,
        residual: None,
    })
}

/// `xᵀCy − π₁ − π₂` at a point feasible for the bilinear program.
pub fn bp_objective(g: &BimatrixGame, prof: &MixedProfile, pi1: f64, pi2: f64) -> Result<f64> {
    prof.check_dims(g.n())?;
    for (name, v) in [("pi1", pi1), ("pi2", pi2)] {
        if !(v.abs() <= 1.0 + FEAS_TOL) {
            return Err(Error::Infeasible(format!("{name} = {v} outside [-1, 1]")));
        }
    }
    for (i, v) in g.a.mul_vec(&prof.y).iter().enumerate() {
        if *v > pi1 + FEAS_TOL {
            return Err(Error::Infeasible(format!("row {i}: (Ay)_{i} = {v} exceeds pi1 = {pi1}")));
        }
    }
    for (j, v) in g.b.vec_mul(&prof.x).iter().enumerate() {
        if *v > pi2 + FEAS_TOL {
            return Err(Error::Infeasible(format!("column {j}: (xB)_{j} = {v} exceeds pi2 = {pi2}")));
        }
    }
    Ok(g.c.bilinear(&prof.x, &prof.y) - pi1 - pi2)
}

/// The game `(αA, βB + γ𝟙)` divided by `σ = max(1, max entry)` so it is
/// normalized again, with the factor `min(α, β)/σ` by which ε shrinks.
pub fn normalize_scaled_game(
    a: &Matrix,
    b: &Matrix,
    alpha: f64,
    beta: f64,
    gamma_shift: f64,
) -> Result<(BimatrixGame, f64)> {
    for (field, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(field, "must be positive and finite"));
        }
    }
    if !gamma_shift.is_finite() {
        return Err(Error::invalid("gamma", "must be finite"));
    }
    let sa = a.map(|v| alpha * v);
    let sb = b.map(|v| beta * v + gamma_shift);
    let sigma = sa.max_abs().max(sb.max_abs()).max(1.0);
    if !sigma.is_finite() {
        return Err(Error::invalid("alpha", "scaled payoffs overflow"));
    }
    let game = BimatrixGame::new(sa.map(|v| v / sigma), sb.map(|v| v / sigma))?;
    Ok((game, alpha.min(beta) / sigma))
}
