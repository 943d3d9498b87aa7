use crate::error::{shape_err, Error, Result};
use crate::linalg::Matrix;
use crate::tensor::shape::{multi_index, Limits, Shape};
use crate::Scalar;

/// Explicit `d`-way array; the brute-force oracle representation.
///
/// Values are stored in multi-index order (last index fastest), so the
/// value at linear position `p` is `X(multi_index_inv(p + 1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor<T> {
    shape: Shape,
    data: Vec<T>,
}

impl<T: Scalar> DenseTensor<T> {
    pub fn from_values(shape: Shape, data: Vec<T>) -> Result<Self> {
        let expected = shape.num_elements();
        if expected != Some(data.len()) {
            return shape_err(format!("{} values for shape {shape}", data.len()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("dense tensor values".into()));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Shape, limits: &Limits) -> Result<Self> {
        let n = limits.check_dense("dense tensor", shape.num_elements())?;
        Ok(Self {
            shape,
            data: vec![T::zero(); n],
        })
    }

    /// Builds a tensor from a function of the 1-based multi-index.
    pub fn from_fn(
        shape: Shape,
        limits: &Limits,
        mut f: impl FnMut(&[usize]) -> T,
    ) -> Result<Self> {
        let n = limits.check_dense("dense tensor", shape.num_elements())?;
        let mut data = Vec::with_capacity(n);
        for_each_index(&shape, |idx| data.push(f(idx)));
        Self::from_values(shape, data)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn into_values(self) -> Vec<T> {
        self.data
    }

    /// Element at a 1-based multi-index.
    pub fn get(&self, indices: &[usize]) -> Result<T> {
        Ok(self.data[multi_index(indices, &self.shape)? - 1])
    }

    pub fn frobenius_norm(&self) -> T {
        crate::linalg::matrix::frobenius(&self.data)
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        self.same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a * b)
            .sum())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        Ok(Self {
            shape: self.shape.clone(),
            data,
        })
    }

    pub fn scale(mut self, c: T) -> Self {
        self.data.iter_mut().for_each(|v| *v *= c);
        self
    }

    /// Largest value and its 1-based multi-index; ties keep the first.
    pub fn argmax(&self) -> (T, Vec<usize>) {
        let mut best = 0;
        for (p, v) in self.data.iter().enumerate() {
            if *v > self.data[best] {
                best = p;
            }
        }
        let idx = crate::tensor::multi_index_inv(best + 1, &self.shape).expect("in range");
        (self.data[best], idx)
    }

    /// Mode-`(1,…,k)` matricization, `(n_1⋯n_k) × (n_{k+1}⋯n_d)`.
    pub fn unfold(&self, k: usize) -> Result<Matrix<T>> {
        let d = self.shape.order();
        if k == 0 || k >= d {
            return Err(Error::Bounds(format!("unfolding split {k} outside 1..{d}")));
        }
        let rows = self.shape.span(0, k);
        let cols = self.shape.span(k, d);
        Ok(Matrix::from_fn(rows, cols, |i, j| self.data[i * cols + j]))
    }

    /// Inverse of [`DenseTensor::unfold`].
    pub fn fold(m: &Matrix<T>, shape: Shape, k: usize) -> Result<Self> {
        let d = shape.order();
        if k == 0 || k >= d {
            return Err(Error::Bounds(format!("unfolding split {k} outside 1..{d}")));
        }
        let (rows, cols) = (shape.span(0, k), shape.span(k, d));
        if m.shape() != (rows, cols) {
            return shape_err(format!(
                "{}x{} matrix cannot fold to {shape} at split {k}",
                m.rows(),
                m.cols()
            ));
        }
        let mut data = vec![T::zero(); rows * cols];
        for j in 0..cols {
            for (i, &v) in m.col(j).iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        Self::from_values(shape, data)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return shape_err(format!("{} vs {}", self.shape, other.shape));
        }
        Ok(())
    }
}

/// Elementwise product.
pub fn hadamard_dense<T: Scalar>(y: &DenseTensor<T>, z: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    y.same_shape(z)?;
    let data = y.data.iter().zip(&z.data).map(|(&a, &b)| a * b).collect();
    Ok(DenseTensor {
        shape: y.shape.clone(),
        data,
    })
}

/// Kronecker product of two order-`d` tensors: mode `k` of the result has
/// size `n_k m_k`, indexed by the pair multi-index `(i_k, j_k)`.
pub fn kron_dense<T: Scalar>(
    y: &DenseTensor<T>,
    q: &DenseTensor<T>,
    limits: &Limits,
) -> Result<DenseTensor<T>> {
    if y.shape.order() != q.shape.order() {
        return shape_err(format!("orders of {} and {} differ", y.shape, q.shape));
    }
    let dims: Vec<usize> = y
        .shape
        .dims()
        .iter()
        .zip(q.shape.dims())
        .map(|(&a, &b)| a * b)
        .collect();
    let shape = Shape::new(dims)?;
    let qd = q.shape.dims().to_vec();
    let mut yi = vec![0; qd.len()];
    let mut qi = vec![0; qd.len()];
    DenseTensor::from_fn(shape, limits, |idx| {
        for k in 0..idx.len() {
            yi[k] = (idx[k] - 1) / qd[k] + 1;
            qi[k] = (idx[k] - 1) % qd[k] + 1;
        }
        y.get(&yi).expect("in range") * q.get(&qi).expect("in range")
    })
}

/// Contraction of the trailing `k` modes of `a` with the leading `k` modes
/// of `b`. When every mode is contracted the result has shape `(1)`.
pub fn contract_mode1<T: Scalar>(
    a: &DenseTensor<T>,
    b: &DenseTensor<T>,
    k: usize,
    limits: &Limits,
) -> Result<DenseTensor<T>> {
    let (da, db) = (a.shape.order(), b.shape.order());
    if k == 0 || k > da || k > db {
        return Err(Error::Bounds(format!(
            "cannot contract {k} modes of orders {da} and {db}"
        )));
    }
    if a.shape.dims()[da - k..] != b.shape.dims()[..k] {
        return shape_err(format!(
            "trailing modes of {} do not match leading modes of {}",
            a.shape, b.shape
        ));
    }
    let left = a.shape.span(0, da - k);
    let inner = a.shape.span(da - k, da);
    let right = b.shape.span(k, db);
    let mut dims: Vec<usize> = a.shape.dims()[..da - k].to_vec();
    dims.extend_from_slice(&b.shape.dims()[k..]);
    if dims.is_empty() {
        dims.push(1);
    }
    let shape = Shape::new(dims)?;
    limits.check_dense("contraction result", shape.num_elements())?;
    let mut data = vec![T::zero(); left * right];
    for i in 0..left {
        let arow = &a.data[i * inner..(i + 1) * inner];
        let out = &mut data[i * right..(i + 1) * right];
        for (t, &av) in arow.iter().enumerate() {
            if av == T::zero() {
                continue;
            }
            for (o, &bv) in out.iter_mut().zip(&b.data[t * right..(t + 1) * right]) {
                *o += av * bv;
            }
        }
    }
    DenseTensor::from_values(shape, data)
}

/// Calls `f` on every 1-based multi-index in storage order.
pub(crate) fn for_each_index(shape: &Shape, mut f: impl FnMut(&[usize])) {
    let dims = shape.dims();
    let mut idx = vec![1usize; dims.len()];
    loop {
        f(&idx);
        let mut k = dims.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if idx[k] < dims[k] {
                idx[k] += 1;
                break;
            }
            idx[k] = 1;
        }
    }
}
