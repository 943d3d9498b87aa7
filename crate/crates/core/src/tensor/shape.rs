use std::fmt;

use crate::error::{shape_err, Error, Result};
use crate::linalg::Matrix;
use crate::Scalar;

/// Mode sizes `n_1, …, n_d` of an order-`d` tensor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return shape_err("a tensor needs at least one mode");
        }
        if let Some(k) = dims.iter().position(|&n| n == 0) {
            return shape_err(format!("mode {} has size zero", k + 1));
        }
        Ok(Self { dims })
    }

    /// `d` modes of size `n`.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![n; d])
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of elements, or `None` on overflow.
    pub fn num_elements(&self) -> Option<usize> {
        self.dims
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
    }

    /// Product of the sizes of modes `start..end` (0-based, saturating).
    pub(crate) fn span(&self, start: usize, end: usize) -> usize {
        self.dims[start..end]
            .iter()
            .fold(1usize, |acc, &n| acc.saturating_mul(n))
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join("x"))
    }
}

/// TT rank chain `r_0 = 1, r_1, …, r_{d−1}, r_d = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankChain(Vec<usize>);

impl RankChain {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        if ranks.len() < 2 {
            return shape_err("a rank chain has at least two entries");
        }
        if ranks[0] != 1 || ranks[ranks.len() - 1] != 1 {
            return shape_err(format!("boundary ranks must be 1, got {ranks:?}"));
        }
        if ranks.contains(&0) {
            return shape_err(format!("ranks must be positive, got {ranks:?}"));
        }
        Ok(Self(ranks))
    }

    /// `{1, r, …, r, 1}` for an order-`d` tensor.
    pub fn uniform(d: usize, r: usize) -> Result<Self> {
        let mut ranks = vec![r; d + 1];
        ranks[0] = 1;
        ranks[d] = 1;
        Self::new(ranks)
    }

    /// Number of cores the chain describes.
    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(1)
    }

    /// Elementwise product, the rank chain of a Hadamard product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    /// Elementwise sum of interior ranks, the rank chain of a TT sum.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        let mut out = self.zip(other, |a, b| a + b)?;
        let last = out.0.len() - 1;
        out.0[0] = 1;
        out.0[last] = 1;
        Ok(out)
    }

    fn zip(&self, other: &Self, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        if self.0.len() != other.0.len() {
            return shape_err(format!("rank chains {self} and {other} differ in length"));
        }
        Ok(Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    /// True when every rank is at most the corresponding entry of `bound`.
    pub fn dominated_by(&self, bound: &Self) -> bool {
        self.0.len() == bound.0.len() && self.0.iter().zip(&bound.0).all(|(a, b)| a <= b)
    }
}

impl std::ops::Index<usize> for RankChain {
    type Output = usize;
    fn index(&self, k: usize) -> &usize {
        &self.0[k]
    }
}

impl fmt::Display for RankChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
        write!(f, "{}", parts.join("-"))
    }
}

/// Element-count caps for materialized data.
///
/// `dense_elements` bounds full dense tensors (oracles); `core_elements`
/// bounds any single TT core produced by a partial Kronecker product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub dense_elements: usize,
    pub core_elements: usize,
}

pub const DEFAULT_DENSE_CAP: usize = 1_000_000;

/// Environment variable overriding [`Limits::dense_elements`].
pub const DENSE_CAP_ENV: &str = "HATT_DENSE_CAP";

impl Default for Limits {
    fn default() -> Self {
        Self {
            dense_elements: DEFAULT_DENSE_CAP,
            core_elements: usize::MAX,
        }
    }
}

impl Limits {
    pub fn unlimited() -> Self {
        Self {
            dense_elements: usize::MAX,
            core_elements: usize::MAX,
        }
    }

    /// Defaults, with the dense cap taken from `HATT_DENSE_CAP` when set.
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Some(cap) = std::env::var(DENSE_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
        {
            if cap >= 1.0 {
                limits.dense_elements = cap as usize;
            }
        }
        limits
    }

    pub(crate) fn check_dense(&self, what: &str, requested: Option<usize>) -> Result<usize> {
        check(what, requested, self.dense_elements)
    }

    pub(crate) fn check_core(&self, what: &str, requested: usize) -> Result<usize> {
        check(what, Some(requested), self.core_elements)
    }
}

fn check(what: &str, requested: Option<usize>, cap: usize) -> Result<usize> {
    match requested {
        Some(n) if n <= cap => Ok(n),
        other => Err(Error::Resource {
            what: what.to_string(),
            requested: other.unwrap_or(usize::MAX),
            cap,
        }),
    }
}

/// Linear 1-based position of a 1-based multi-index, last index fastest:
/// `i_d + (i_{d−1}−1)n_d + … + (i_1−1)n_2⋯n_d`.
pub fn multi_index(indices: &[usize], shape: &Shape) -> Result<usize> {
    if indices.len() != shape.order() {
        return shape_err(format!(
            "{} indices for an order-{} tensor",
            indices.len(),
            shape.order()
        ));
    }
    let mut linear = 0usize;
    for (k, (&i, &n)) in indices.iter().zip(shape.dims()).enumerate() {
        if i == 0 || i > n {
            return Err(Error::Bounds(format!(
                "index {i} in mode {} outside 1..={n}",
                k + 1
            )));
        }
        linear = linear * n + (i - 1);
    }
    Ok(linear + 1)
}

/// Inverse of [`multi_index`].
pub fn multi_index_inv(linear: usize, shape: &Shape) -> Result<Vec<usize>> {
    let total = shape.num_elements().unwrap_or(usize::MAX);
    if linear == 0 || linear > total {
        return Err(Error::Bounds(format!(
            "linear index {linear} outside 1..={total}"
        )));
    }
    let mut rest = linear - 1;
    let mut out = vec![0; shape.order()];
    for (slot, &n) in out.iter_mut().zip(shape.dims()).rev() {
        *slot = rest % n + 1;
        rest /= n;
    }
    Ok(out)
}

/// Column-stacking vectorisation.
pub fn vec_matrix<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    m.as_slice().to_vec()
}

/// Inverse of [`vec_matrix`]: fills an `m×n` matrix column by column.
pub fn mat_vector<T: Scalar>(v: &[T], m: usize, n: usize) -> Result<Matrix<T>> {
    Matrix::from_col_major(m, n, v.to_vec())
}
