//! Few basis vectors cannot approximate the barycenter: every convex
//! combination of `k < 1/(4ε^{p/(p−1)})` standard basis vectors of `ℝ^d` is
//! more than `ε` away from `ē = (1/d, …, 1/d)` in the p-norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCase {
    pub d: usize,
    pub p: f64,
    pub eps: f64,
}

impl LowerBoundCase {
    pub fn new(d: usize, p: f64, eps: f64) -> Result<Self> {
        if !(p >= 2.0) || !p.is_finite() {
            return Err(Error::invalid("p", "must be finite and at least 2"));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::invalid("eps", "must lie in (0, 1)"));
        }
        let case = LowerBoundCase { d, p, eps };
        if case.inverse_power() >= d as f64 {
            return Err(Error::invalid(
                "d",
                format!("need 1/eps^(p/(p-1)) = {} < d = {d}", case.inverse_power()),
            ));
        }
        Ok(case)
    }

    fn inverse_power(&self) -> f64 {
        self.eps.powf(-self.p / (self.p - 1.0))
    }

    pub fn k_threshold(&self) -> f64 {
        self.inverse_power() / 4.0
    }

    /// Largest integer strictly below the threshold.
    pub fn max_k(&self) -> usize {
        let t = self.k_threshold();
        let f = t.floor();
        (if f == t { f - 1.0 } else { f }).max(0.0) as usize
    }
}

/// Minimum p-distance from `ē` to the hull of any `k` basis vectors, attained
/// by equal weights `1/k`.
pub fn best_k_uniform_distance(d: usize, k: usize, p: f64) -> Result<f64> {
    if k == 0 || k > d {
        return Err(Error::invalid("k", format!("need 1 <= k <= d = {d}")));
    }
    let (d, k) = (d as f64, k as f64);
    let sum = k * (1.0 / k - 1.0 / d).powf(p) + (d - k) * (1.0 / d).powf(p);
    Ok(sum.powf(1.0 / p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub k: usize,
    pub distance: f64,
    /// `distance − ε`; positive for every row of a passing report.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub case: LowerBoundCase,
    pub k_threshold: f64,
    pub rows: Vec<LowerBoundRow>,
    pub pass: bool,
}

impl LowerBoundReport {
    pub fn min_distance(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.distance).reduce(f64::min)
    }
}

/// Distances for every `k` strictly below `1/(4ε^{p/(p−1)})`, without the
/// `1/ε^{p/(p−1)} < d` precondition.
pub fn lower_bound_sweep(d: usize, p: f64, eps: f64) -> Result<Vec<LowerBoundRow>> {
    let case = LowerBoundCase { d, p, eps };
    (1..=case.max_k().min(d))
        .map(|k| {
            let distance = best_k_uniform_distance(d, k, p)?;
            Ok(LowerBoundRow {
                k,
                distance,
                margin: distance - eps,
            })
        })
        .collect()
}

pub fn verify_lower_bound(case: &LowerBoundCase) -> Result<LowerBoundReport> {
    let case = LowerBoundCase::new(case.d, case.p, case.eps)?;
    let rows = lower_bound_sweep(case.d, case.p, case.eps)?;
    let pass = rows.iter().all(|r| r.margin > 0.0);
    Ok(LowerBoundReport {
        case,
        k_threshold: case.k_threshold(),
        rows,
        pass,
    })
}
