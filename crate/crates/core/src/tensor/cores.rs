use std::cell::Cell;

use crate::error::{shape_err, Error, Result};
use crate::linalg::Matrix;
use crate::tensor::dense::DenseTensor;
use crate::tensor::shape::{Limits, Shape};
use crate::Scalar;

/// Order-3 TT core of extent `left × mode × right`.
///
/// Storage is the column-major vertical unfolding: entry `(α, i, β)`
/// (0-based) lives at `i + mode·α + mode·left·β`.
#[derive(Debug, Clone, PartialEq)]
pub struct TtCore<T> {
    left: usize,
    mode: usize,
    right: usize,
    data: Vec<T>,
}

impl<T: Scalar> TtCore<T> {
    pub fn new(left: usize, mode: usize, right: usize, data: Vec<T>) -> Result<Self> {
        if left == 0 || mode == 0 || right == 0 {
            return shape_err(format!(
                "core extents must be positive: {left}x{mode}x{right}"
            ));
        }
        if data.len() != left * mode * right {
            return shape_err(format!(
                "{} values for a {left}x{mode}x{right} core",
                data.len()
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("TT core values".into()));
        }
        Ok(Self {
            left,
            mode,
            right,
            data,
        })
    }

    pub fn zeros(left: usize, mode: usize, right: usize) -> Self {
        Self {
            left,
            mode,
            right,
            data: vec![T::zero(); left * mode * right],
        }
    }

    /// Builds a core from `f(α, i, β)` with 1-based arguments.
    pub fn from_fn(
        left: usize,
        mode: usize,
        right: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(left * mode * right);
        for b in 1..=right {
            for a in 1..=left {
                for i in 1..=mode {
                    data.push(f(a, i, b));
                }
            }
        }
        Self::new(left, mode, right, data)
    }

    /// Core whose slices are the given `left × right` matrices.
    pub fn from_slices(slices: &[Matrix<T>]) -> Result<Self> {
        let Some(first) = slices.first() else {
            return shape_err("a core needs at least one slice");
        };
        let (left, right) = first.shape();
        if slices.iter().any(|s| s.shape() != (left, right)) {
            return shape_err("slices of one core must share a shape");
        }
        let mode = slices.len();
        let mut core = Self::zeros(left, mode, right);
        for (i, s) in slices.iter().enumerate() {
            for b in 0..right {
                for a in 0..left {
                    core.data[i + mode * a + mode * left * b] = s[(a, b)];
                }
            }
        }
        core.check_finite()?;
        Ok(core)
    }

    /// Reshapes a `(left·mode) × right` matrix into a core.
    pub fn from_vertical(v: Matrix<T>, left: usize, mode: usize) -> Result<Self> {
        if v.rows() != left * mode {
            return shape_err(format!("{} rows cannot split as {left}x{mode}", v.rows()));
        }
        let right = v.cols();
        Self::new(left, mode, right, v.into_vec())
    }

    /// Reshapes a `left × (mode·right)` matrix into a core; column
    /// `β + right·i` holds mode index `i`.
    pub fn from_horizontal(h: &Matrix<T>, mode: usize, right: usize) -> Result<Self> {
        if h.cols() != mode * right {
            return shape_err(format!(
                "{} columns cannot split as {mode}x{right}",
                h.cols()
            ));
        }
        let left = h.rows();
        let mut core = Self::zeros(left, mode, right);
        for i in 0..mode {
            for b in 0..right {
                let col = h.col(b + right * i);
                for (a, &v) in col.iter().enumerate() {
                    core.data[i + mode * a + mode * left * b] = v;
                }
            }
        }
        core.check_finite()?;
        Ok(core)
    }

    pub fn left_rank(&self) -> usize {
        self.left
    }

    pub fn mode_size(&self) -> usize {
        self.mode
    }

    pub fn right_rank(&self) -> usize {
        self.right
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.left, self.mode, self.right)
    }

    pub fn num_elements(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Entry `(α, i, β)`, 1-based. Panics when out of range.
    pub fn get(&self, alpha: usize, i: usize, beta: usize) -> T {
        assert!(
            (1..=self.left).contains(&alpha)
                && (1..=self.mode).contains(&i)
                && (1..=self.right).contains(&beta),
            "core index ({alpha}, {i}, {beta}) outside {}x{}x{}",
            self.left,
            self.mode,
            self.right
        );
        self.data[(i - 1) + self.mode * (alpha - 1) + self.mode * self.left * (beta - 1)]
    }

    /// Lateral slice `X(i)` for a 1-based mode index.
    pub fn slice(&self, i: usize) -> Matrix<T> {
        assert!(
            (1..=self.mode).contains(&i),
            "slice {i} outside 1..={}",
            self.mode
        );
        let (l, n) = (self.left, self.mode);
        Matrix::from_fn(l, self.right, |a, b| self.data[(i - 1) + n * a + n * l * b])
    }

    /// All lateral slices; element `i` of the result is `X(i + 1)`.
    pub fn slices(&self) -> Vec<Matrix<T>> {
        (1..=self.mode).map(|i| self.slice(i)).collect()
    }

    /// `V⟨X⟩`, the `(left·mode) × right` unfolding.
    pub fn vertical(&self) -> Matrix<T> {
        Matrix::from_col_major(self.left * self.mode, self.right, self.data.clone())
            .expect("consistent core storage")
    }

    pub fn into_vertical(self) -> Matrix<T> {
        Matrix::from_col_major(self.left * self.mode, self.right, self.data)
            .expect("consistent core storage")
    }

    /// `H⟨X⟩`, the `left × (mode·right)` unfolding.
    pub fn horizontal(&self) -> Matrix<T> {
        let (l, n, r) = self.dims();
        let mut h = Matrix::zeros(l, n * r);
        for i in 0..n {
            for b in 0..r {
                let col = h.col_mut(b + r * i);
                for (a, o) in col.iter_mut().enumerate() {
                    *o = self.data[i + n * a + n * l * b];
                }
            }
        }
        h
    }

    pub fn to_dense(&self) -> DenseTensor<T> {
        let shape = Shape::new(vec![self.left, self.mode, self.right]).expect("positive extents");
        let mut data = Vec::with_capacity(self.data.len());
        for a in 1..=self.left {
            for i in 1..=self.mode {
                for b in 1..=self.right {
                    data.push(self.get(a, i, b));
                }
            }
        }
        DenseTensor::from_values(shape, data).expect("finite core")
    }

    pub fn scale(mut self, c: T) -> Self {
        self.data.iter_mut().for_each(|v| *v *= c);
        self
    }

    /// `max |VᵀV − I|` of the vertical unfolding.
    pub fn left_orthogonality_defect(&self) -> T {
        self.vertical().orthonormality_defect()
    }

    /// `max |HHᵀ − I|` of the horizontal unfolding.
    pub fn right_orthogonality_defect(&self) -> T {
        self.horizontal().transpose().orthonormality_defect()
    }

    fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Numeric("TT core values".into()))
        }
    }
}

/// Counters describing the partial Kronecker cores built on this thread.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PkpStats {
    /// Cores built.
    pub built: usize,
    /// Cores with both rank extents above one (Hadamard interior cores).
    pub interior: usize,
    /// Largest element count of any core built.
    pub max_elements: usize,
}

thread_local! {
    static PKP_STATS: Cell<PkpStats> = Cell::new(PkpStats::default());
}

pub fn pkp_stats() -> PkpStats {
    PKP_STATS.with(Cell::get)
}

pub fn reset_pkp_stats() {
    PKP_STATS.with(|s| s.set(PkpStats::default()));
}

/// Partial Kronecker product: slice `i` of the result is `Y(i) ⊗ Z(i)`, so
/// entry `(β + s·α, i, β' + s'·α')` (0-based) is `Y(α,i,α')·Z(β,i,β')`.
pub fn pkp_cores<T: Scalar>(y: &TtCore<T>, z: &TtCore<T>) -> Result<TtCore<T>> {
    pkp_cores_with_limits(y, z, &Limits::unlimited())
}

/// [`pkp_cores`] refusing to allocate more than `limits.core_elements`.
pub fn pkp_cores_with_limits<T: Scalar>(
    y: &TtCore<T>,
    z: &TtCore<T>,
    limits: &Limits,
) -> Result<TtCore<T>> {
    if y.mode != z.mode {
        return shape_err(format!(
            "partial Kronecker product of modes {} and {}",
            y.mode, z.mode
        ));
    }
    let n = y.mode;
    let (left, right) = (y.left * z.left, y.right * z.right);
    let total = left
        .checked_mul(right)
        .and_then(|x| x.checked_mul(n))
        .unwrap_or(usize::MAX);
    limits.check_core("partial Kronecker core", total)?;
    PKP_STATS.with(|s| {
        let mut st = s.get();
        st.built += 1;
        if left > 1 && right > 1 {
            st.interior += 1;
        }
        st.max_elements = st.max_elements.max(total);
        s.set(st);
    });

    let mut data = vec![T::zero(); total];
    let (s0, s1) = (z.left, z.right);
    for a1 in 0..y.right {
        for b1 in 0..s1 {
            let col = b1 + s1 * a1;
            for a0 in 0..y.left {
                for b0 in 0..s0 {
                    let row = b0 + s0 * a0;
                    let out = &mut data[n * row + n * left * col..][..n];
                    let ys = &y.data[n * a0 + n * y.left * a1..][..n];
                    let zs = &z.data[n * b0 + n * z.left * b1..][..n];
                    for ((o, &yv), &zv) in out.iter_mut().zip(ys).zip(zs) {
                        *o = yv * zv;
                    }
                }
            }
        }
    }
    Ok(TtCore {
        left,
        mode: n,
        right,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron_matrix;

    fn core(l: usize, n: usize, r: usize, seed: f64) -> TtCore<f64> {
        TtCore::from_fn(l, n, r, |a, i, b| ((a * 7 + i * 3 + b) as f64 * seed).sin()).unwrap()
    }

    #[test]
    fn unfoldings_have_expected_shapes_and_entries() {
        let x = core(2, 3, 4, 0.3);
        let v = x.vertical();
        let h = x.horizontal();
        assert_eq!(v.shape(), (6, 4));
        assert_eq!(h.shape(), (2, 12));
        for a in 1..=2 {
            for i in 1..=3 {
                for b in 1..=4 {
                    let e = x.get(a, i, b);
                    assert_eq!(v[((i - 1) + 3 * (a - 1), b - 1)], e);
                    assert_eq!(h[(a - 1, (b - 1) + 4 * (i - 1))], e);
                    assert_eq!(x.slice(i)[(a - 1, b - 1)], e);
                }
            }
        }
        assert_eq!(TtCore::from_horizontal(&h, 3, 4).unwrap(), x);
        assert_eq!(TtCore::from_vertical(v, 2, 3).unwrap(), x);
        assert_eq!(TtCore::from_slices(&x.slices()).unwrap(), x);
    }

    #[test]
    fn pkp_shape_rule() {
        let p = pkp_cores(&core(2, 3, 4, 0.1), &core(5, 3, 7, 0.2)).unwrap();
        assert_eq!(p.dims(), (10, 3, 28));
        assert!(pkp_cores(&core(2, 3, 4, 0.1), &core(2, 2, 2, 0.1)).is_err());
    }

    #[test]
    fn pkp_of_ones_is_ones() {
        let ones = TtCore::from_fn(2, 3, 2, |_, _, _| 1.0).unwrap();
        let p = pkp_cores(&ones, &ones).unwrap();
        assert!(p.as_slice().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn pkp_entries_exhaustive() {
        let y = core(2, 2, 2, 0.7);
        let z = core(2, 2, 2, 1.3);
        let p = pkp_cores(&y, &z).unwrap();
        for a0 in 1..=2 {
            for b0 in 1..=2 {
                for i in 1..=2 {
                    for a1 in 1..=2 {
                        for b1 in 1..=2 {
                            let row = b0 + 2 * (a0 - 1);
                            let col = b1 + 2 * (a1 - 1);
                            assert_eq!(p.get(row, i, col), y.get(a0, i, a1) * z.get(b0, i, b1));
                        }
                    }
                }
            }
        }
        for i in 1..=2 {
            assert_eq!(p.slice(i), kron_matrix(&y.slice(i), &z.slice(i)));
        }
    }

    #[test]
    fn pkp_cap_and_stats() {
        reset_pkp_stats();
        let limits = Limits {
            core_elements: 100,
            ..Limits::default()
        };
        let err =
            pkp_cores_with_limits(&core(4, 3, 4, 0.1), &core(4, 3, 4, 0.2), &limits).unwrap_err();
        assert!(err.is_resource());
        assert_eq!(pkp_stats().built, 0);
        pkp_cores(&core(1, 3, 2, 0.1), &core(1, 3, 2, 0.2)).unwrap();
        pkp_cores(&core(2, 3, 2, 0.1), &core(2, 3, 2, 0.2)).unwrap();
        let st = pkp_stats();
        assert_eq!((st.built, st.interior, st.max_elements), (2, 1, 48));
    }
}
