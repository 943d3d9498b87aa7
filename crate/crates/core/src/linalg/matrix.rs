use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{shape_err, Error, Result};
use crate::linalg::FlopLedger;
use crate::Scalar;

/// Dense column-major matrix with 0-based `(row, col)` indexing.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return shape_err(format!(
                "{} values cannot fill a {rows}x{cols} matrix",
                data.len()
            ));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row slices; convenient for literals.
    pub fn from_rows(rows: &[&[T]]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return shape_err("ragged rows");
        }
        Ok(Self::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Column-major storage.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    /// Columns `start..end` as a new matrix.
    pub fn col_range(&self, start: usize, end: usize) -> Self {
        Self {
            rows: self.rows,
            cols: end - start,
            data: self.data[start * self.rows..end * self.rows].to_vec(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for (i, &v) in self.col(j).iter().enumerate() {
                t.data[i * self.cols + j] = v;
            }
        }
        t
    }

    /// Reinterprets the storage with a new shape (column-major order kept).
    pub fn reshape(self, rows: usize, cols: usize) -> Result<Self> {
        Self::from_col_major(rows, cols, self.data)
    }

    pub fn frobenius_norm(&self) -> T {
        frobenius(&self.data)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scale(mut self, c: T) -> Self {
        self.data.iter_mut().for_each(|v| *v *= c);
        self
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.shape() != other.shape() {
            return shape_err(format!("{:?} vs {:?}", self.shape(), other.shape()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// `max |AᵀA − I|`: how far the columns are from orthonormal.
    pub fn orthonormality_defect(&self) -> T {
        let mut scratch = FlopLedger::new();
        let g = matmul_tn(self, self, &mut scratch).expect("square Gram matrix");
        let mut worst = T::zero();
        for j in 0..g.cols {
            for i in 0..g.rows {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    pub(crate) fn ensure_finite(&self, what: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::Numeric(what.to_string()))
        }
    }
}

pub(crate) fn frobenius<T: Scalar>(values: &[T]) -> T {
    // Scaled sum of squares to avoid overflow for large entries.
    let scale = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let sum: T = values.iter().map(|&v| (v / scale) * (v / scale)).sum();
    scale * sum.sqrt()
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format!("{:?}", self[(i, j)]))
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[inline]
fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

/// `A·B`, charging `m(2n−1)r`.
pub fn matmul<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    ledger: &mut FlopLedger,
) -> Result<Matrix<T>> {
    if a.cols != b.rows {
        return shape_err(format!(
            "matmul inner dimensions {}x{} · {}x{}",
            a.rows, a.cols, b.rows, b.cols
        ));
    }
    let mut c = Matrix::zeros(a.rows, b.cols);
    for j in 0..b.cols {
        let cj = &mut c.data[j * a.rows..(j + 1) * a.rows];
        for p in 0..a.cols {
            let bpj = b.data[j * b.rows + p];
            if bpj != T::zero() {
                axpy(bpj, &a.data[p * a.rows..(p + 1) * a.rows], cj);
            }
        }
    }
    ledger.charge_matmul(a.rows, a.cols, b.cols);
    Ok(c)
}

/// `Aᵀ·B` without forming the transpose.
pub fn matmul_tn<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    ledger: &mut FlopLedger,
) -> Result<Matrix<T>> {
    if a.rows != b.rows {
        return shape_err(format!(
            "matmul_tn inner dimensions ({}x{})ᵀ · {}x{}",
            a.rows, a.cols, b.rows, b.cols
        ));
    }
    let mut c = Matrix::zeros(a.cols, b.cols);
    for j in 0..b.cols {
        let bj = b.col(j);
        for i in 0..a.cols {
            c.data[j * a.cols + i] = dot(a.col(i), bj);
        }
    }
    ledger.charge_matmul(a.cols, a.rows, b.cols);
    Ok(c)
}

/// `A·Bᵀ` without forming the transpose.
pub fn matmul_nt<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    ledger: &mut FlopLedger,
) -> Result<Matrix<T>> {
    if a.cols != b.cols {
        return shape_err(format!(
            "matmul_nt inner dimensions {}x{} · ({}x{})ᵀ",
            a.rows, a.cols, b.rows, b.cols
        ));
    }
    let mut c = Matrix::zeros(a.rows, b.rows);
    for p in 0..a.cols {
        let ap = &a.data[p * a.rows..(p + 1) * a.rows];
        for j in 0..b.rows {
            let bjp = b.data[p * b.rows + j];
            if bjp != T::zero() {
                axpy(bjp, ap, &mut c.data[j * a.rows..(j + 1) * a.rows]);
            }
        }
    }
    ledger.charge_matmul(a.rows, a.cols, b.rows);
    Ok(c)
}
