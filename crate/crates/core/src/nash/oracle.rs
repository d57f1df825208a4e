use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::game::{BimatrixGame, MixedProfile};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lp::{solve_lp, Polytope};

pub const ORACLE_MAX_N: usize = 5;

/// Exact equilibrium in rational arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactEquilibrium {
    pub x: Vec<BigRational>,
    pub y: Vec<BigRational>,
    /// Row player's payoff `xᵀAy`.
    pub row_value: BigRational,
    /// Column player's payoff `xᵀBy`.
    pub col_value: BigRational,
}

impl ExactEquilibrium {
    pub fn to_profile(&self) -> MixedProfile {
        let f = |v: &[BigRational]| v.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
        MixedProfile::new(f(&self.x), f(&self.y)).expect("exact equilibrium is a profile")
    }
}

/// All equilibria found by support enumeration, as floating-point profiles.
pub fn exact_nash_oracle(g: &BimatrixGame) -> Result<Vec<MixedProfile>> {
    Ok(exact_equilibria(g)?.iter().map(ExactEquilibrium::to_profile).collect())
}

/// For each pair of nonempty supports `(I, J)`, looks for `y` on `J` making
/// every row of `I` a best response and `x` on `I` making every column of `J`
/// a best response. Payoffs are converted exactly from their binary values.
pub fn exact_equilibria(g: &BimatrixGame) -> Result<Vec<ExactEquilibrium>> {
    let n = g.n();
    if n > ORACLE_MAX_N {
        return Err(Error::TooLarge(format!("support enumeration needs n <= {ORACLE_MAX_N}, got {n}")));
    }
    let a = to_rational(&g.a);
    let bt = to_rational(&g.b.transpose());
    let mut found: Vec<ExactEquilibrium> = Vec::new();
    for rows in 1u32..(1 << n) {
        for cols in 1u32..(1 << n) {
            let Some((y, v1)) = indifferent_mix(&a, cols, rows) else { continue };
            let Some((x, v2)) = indifferent_mix(&bt, rows, cols) else { continue };
            let eq = ExactEquilibrium {
                x,
                y,
                row_value: v1,
                col_value: v2,
            };
            if !found.contains(&eq) {
                found.push(eq);
            }
        }
    }
    Ok(found)
}

fn to_rational(m: &Matrix) -> Vec<Vec<BigRational>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| BigRational::from_float(m[(i, j)]).expect("finite payoff"))
                .collect()
        })
        .collect()
}

/// Mixed strategy `z` supported in `support` (over the columns of `m`) with
/// `(mz)_i = v` for `i ∈ tight` and `(mz)_i ≤ v` otherwise.
fn indifferent_mix(m: &[Vec<BigRational>], support: u32, tight: u32) -> Option<(Vec<BigRational>, BigRational)> {
    let n = m.len();
    let idx: Vec<usize> = (0..n).filter(|j| support >> j & 1 == 1).collect();
    let k = idx.len();
    let iv = k;
    let mut poly: Polytope<BigRational> = Polytope::new(k + 1);
    poly.free(iv);
    let mut ones = vec![BigRational::one(); k];
    ones.push(BigRational::zero());
    poly.add_eq(ones, BigRational::one());
    for (i, row) in m.iter().enumerate() {
        let mut coeffs: Vec<BigRational> = idx.iter().map(|&j| row[j].clone()).collect();
        coeffs.push(-BigRational::one());
        if tight >> i & 1 == 1 {
            poly.add_eq(coeffs, BigRational::zero());
        } else {
            poly.add_le(coeffs, BigRational::zero());
        }
    }
    let sol = solve_lp(&vec![BigRational::zero(); k + 1], &poly);
    if !sol.is_optimal() {
        return None;
    }
    let mut z = vec![BigRational::zero(); n];
    for (pos, &j) in idx.iter().enumerate() {
        z[j] = sol.point[pos].clone();
    }
    Some((z, sol.point[iv].clone()))
}
