//! Dense vectors and matrices, p-norms, uniform combinations over point sets
//! and seeded randomness shared by every solver in the crate.

use std::fmt;
use std::ops::{Deref, Index};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries with magnitude at or below this are treated as zero when counting support.
pub const ZERO_TOL: f64 = 1e-12;

/// A finite, nonempty real vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("vector", "dimension must be at least 1"));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(Vector(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Vector(vec![0.0; dim])
    }

    /// Uniform point of the simplex, `(1/dim, ..., 1/dim)`.
    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Vector(vec![1.0 / dim as f64; dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn sub(&self, other: &[f64]) -> Vector {
        Vector(self.0.iter().zip(other).map(|(a, b)| a - b).collect())
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Vec<f64> {
        v.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense row-major matrix with finite entries. Serializes as an array of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(Error::invalid("matrix", "dimensions must be at least 1"));
        }
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("matrix rows have unequal lengths".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// `M v`
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `vᵀ M`, returned as a column-indexed vector.
    pub fn vec_mul(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += vi * m;
            }
        }
        out
    }

    /// `xᵀ M y`
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.mul_vec(y))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}

/// A p-norm with `p` in `[2, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormRepr", into = "NormRepr")]
pub enum NormSpec {
    P(f64),
    Inf,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NormRepr {
    Num(f64),
    Text(String),
}

impl TryFrom<NormRepr> for NormSpec {
    type Error = Error;
    fn try_from(r: NormRepr) -> Result<Self> {
        match r {
            NormRepr::Num(p) => NormSpec::p(p),
            NormRepr::Text(s) => s.parse(),
        }
    }
}

impl From<NormSpec> for NormRepr {
    fn from(n: NormSpec) -> Self {
        match n {
            NormSpec::P(p) => NormRepr::Num(p),
            NormSpec::Inf => NormRepr::Text("inf".into()),
        }
    }
}

impl std::str::FromStr for NormSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "inf" || t == "infinity" {
            return Ok(NormSpec::Inf);
        }
        let p: f64 = t
            .parse()
            .map_err(|_| Error::invalid("norm", format!("cannot parse `{s}`")))?;
        NormSpec::p(p)
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::P(p) => write!(f, "{p}"),
            NormSpec::Inf => write!(f, "inf"),
        }
    }
}

impl NormSpec {
    pub fn p(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(NormSpec::Inf);
        }
        if !(p >= 2.0) {
            return Err(Error::invalid("p", format!("norm exponent must be >= 2, got {p}")));
        }
        Ok(NormSpec::P(p))
    }

    /// Exponent as a float; `f64::INFINITY` for the max norm.
    pub fn exponent(&self) -> f64 {
        match *self {
            NormSpec::P(p) => p,
            NormSpec::Inf => f64::INFINITY,
        }
    }

    /// Hölder conjugate `q = p / (p - 1)`, equal to 1 for the max norm.
    pub fn conjugate(&self) -> f64 {
        match *self {
            NormSpec::P(p) => p / (p - 1.0),
            NormSpec::Inf => 1.0,
        }
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        norm_with_exponent(v, self.exponent())
    }

    /// Gradient of `v ↦ ‖v‖` at `v`. Returns zero at the origin.
    pub fn gradient(&self, v: &[f64]) -> Vec<f64> {
        match *self {
            NormSpec::Inf => {
                let mut g = vec![0.0; v.len()];
                if let Some((i, m)) = v
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                {
                    if *m != 0.0 {
                        g[i] = m.signum();
                    }
                }
                g
            }
            NormSpec::P(p) => {
                let n = self.norm(v);
                if n == 0.0 {
                    return vec![0.0; v.len()];
                }
                v.iter()
                    .map(|&x| x.signum() * (x.abs() / n).powf(p - 1.0))
                    .collect()
            }
        }
    }
}

/// `‖v‖_p`, computed as `max·(Σ(|v_i|/max)^p)^{1/p}` so large exponents do not overflow.
pub fn p_norm(v: &[f64], norm: NormSpec) -> f64 {
    norm.norm(v)
}

/// Norm with an arbitrary exponent `p >= 1` (used for Hölder conjugates below 2).
pub fn norm_with_exponent(v: &[f64], p: f64) -> f64 {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if max == 0.0 || p.is_infinite() {
        return max;
    }
    if p == 1.0 {
        return v.iter().map(|x| x.abs()).sum();
    }
    if p == 2.0 {
        let s: f64 = v.iter().map(|x| (x / max) * (x / max)).sum();
        return max * s.sqrt();
    }
    let s: f64 = v.iter().map(|x| (x.abs() / max).powf(p)).sum();
    max * s.powf(1.0 / p)
}

/// Number of entries with magnitude above [`ZERO_TOL`].
pub fn l0_count(v: &[f64]) -> usize {
    v.iter().filter(|x| x.abs() > ZERO_TOL).count()
}

/// A nonempty multiset of point indices, stored sorted ascending. Each index
/// carries weight `1/len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct UniformCombination(Vec<usize>);

impl UniformCombination {
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("multiset", "must be nonempty"));
        }
        indices.sort_unstable();
        Ok(UniformCombination(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distinct indices with their multiplicities.
    pub fn counts(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &i in &self.0 {
            match out.last_mut() {
                Some((j, c)) if *j == i => *c += 1,
                _ => out.push((i, 1)),
            }
        }
        out
    }

    /// Weight vector over `n` points.
    pub fn weights(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n];
        let k = self.0.len() as f64;
        for (i, c) in self.counts() {
            w[i] = c as f64 / k;
        }
        w
    }

    /// Average of the selected columns of `m`, i.e. `(1/k) Σ_{i∈S} M^i`.
    pub fn column_average(&self, m: &Matrix) -> Vec<f64> {
        let mut out = vec![0.0; m.rows()];
        let k = self.0.len() as f64;
        for (j, c) in self.counts() {
            let w = c as f64 / k;
            for (i, o) in out.iter_mut().enumerate() {
                *o += w * m.get(i, j);
            }
        }
        out
    }
}

impl TryFrom<Vec<usize>> for UniformCombination {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        UniformCombination::new(v)
    }
}

impl From<UniformCombination> for Vec<usize> {
    fn from(c: UniformCombination) -> Self {
        c.0
    }
}

/// A finite set of equal-dimension points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vector>", into = "Vec<Vector>")]
pub struct PointSet {
    points: Vec<Vector>,
}

impl PointSet {
    pub fn new(points: Vec<Vector>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::invalid("points", "point set must be nonempty"));
        };
        let d = first.dim();
        if let Some(bad) = points.iter().position(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch(format!(
                "point {bad} has dimension {} but point 0 has {d}",
                points[bad].dim()
            )));
        }
        Ok(PointSet { points })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows.into_iter().map(Vector::new).collect::<Result<_>>()?)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Vector {
        &self.points[i]
    }

    /// `γ = max_{x∈X} ‖x‖`.
    pub fn gamma(&self, norm: NormSpec) -> f64 {
        self.points.iter().fold(0.0, |m, x| m.max(norm.norm(x)))
    }

    /// `Σ w_i x_i`.
    pub fn combine(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (x, &w) in self.points.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(x.iter()) {
                *o += w * v;
            }
        }
        out
    }

    /// The points as columns of a `dim × len` matrix.
    pub fn as_columns(&self) -> Matrix {
        Matrix::from_fn(self.dim(), self.len(), |i, j| self.points[j][i])
    }

    pub fn subset(&self, indices: &[usize]) -> PointSet {
        PointSet {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }
}

impl TryFrom<Vec<Vector>> for PointSet {
    type Error = Error;
    fn try_from(v: Vec<Vector>) -> Result<Self> {
        PointSet::new(v)
    }
}

impl From<PointSet> for Vec<Vector> {
    fn from(p: PointSet) -> Self {
        p.points
    }
}

/// The uniform average of the points selected by `c`.
pub fn combination_vector(c: &UniformCombination, x: &PointSet) -> Result<Vector> {
    if let Some(&bad) = c.indices().iter().find(|&&i| i >= x.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: x.len(),
        });
    }
    Vector::new(x.combine(&c.weights(x.len())))
}

/// Seed for every randomized operation. Sub-streams give independent,
/// reproducible generators for retries and parallel workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(&self) -> ChaCha8Rng {
        self.stream(0)
    }

    pub fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

/// Checks `x ∈ Δ^n` within `tol`.
pub fn in_simplex(x: &[f64], tol: f64) -> bool {
    x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - 1.0).abs() <= tol
}

/// Clips negatives and renormalizes onto the simplex.
pub fn simplex_repair(x: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let s: f64 = clipped.iter().sum();
    if s <= 0.0 {
        return vec![1.0 / x.len() as f64; x.len()];
    }
    clipped.iter().map(|v| v / s).collect()
}

pub(crate) fn max_entry(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
