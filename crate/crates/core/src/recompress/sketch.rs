use crate::error::{shape_err, Error, Result};
use crate::linalg::{matmul, matmul_nt, FlopLedger, Matrix};
use crate::tensor::{TtCore, TtTensor};
use crate::Scalar;

/// Partial contraction matrices `W^(1), …, W^(d−1)`.
#[derive(Debug, Clone)]
pub struct SketchSet<T> {
    w: Vec<Matrix<T>>,
}

impl<T: Scalar> SketchSet<T> {
    pub(crate) fn from_rev(mut rev: Vec<Matrix<T>>) -> Self {
        rev.reverse();
        Self { w: rev }
    }

    /// `W^(k)` for `1 ≤ k ≤ d−1`.
    pub fn get(&self, k: usize) -> &Matrix<T> {
        assert!(
            k >= 1 && k <= self.w.len(),
            "sketch index {k} outside 1..={}",
            self.w.len()
        );
        &self.w[k - 1]
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Matrix<T>> {
        self.w.iter()
    }

    /// Largest relative Frobenius distance `‖W_k − V_k‖/‖V_k‖` over `k`.
    pub fn max_relative_distance(&self, other: &Self) -> Result<T> {
        if self.len() != other.len() {
            return shape_err("sketch sets differ in length");
        }
        let mut worst = T::zero();
        for (a, b) in self.w.iter().zip(&other.w) {
            let diff = a.sub(b)?.frobenius_norm();
            let scale = b.frobenius_norm();
            let rel = if scale == T::zero() {
                diff
            } else {
                diff / scale
            };
            worst = worst.max(rel);
        }
        Ok(worst)
    }
}

pub(crate) fn check_sketch_shapes<T: Scalar>(a: &TtTensor<T>, r: &TtTensor<T>) -> Result<()> {
    if a.order() != r.order()
        || a.cores()
            .iter()
            .zip(r.cores())
            .any(|(x, y)| x.mode_size() != y.mode_size())
    {
        return shape_err(format!(
            "sketch tensor shape {} does not match input shape {}",
            r.shape(),
            a.shape()
        ));
    }
    if a.order() < 2 {
        return Err(Error::Domain(
            "partial contractions need at least two cores".into(),
        ));
    }
    Ok(())
}

/// Right-to-left partial contractions of `a` against the sketch tensor `r`:
/// `W^(d−1) = H⟨A^(d)⟩·H⟨R^(d)⟩ᵀ`, then `V⟨B⟩ = V⟨A^(k)⟩·W^(k)` and
/// `W^(k−1) = H⟨B⟩·H⟨R^(k)⟩ᵀ` for `k = d−1, …, 2`.
pub fn partial_contraction_rl<T: Scalar>(
    a: &TtTensor<T>,
    r: &TtTensor<T>,
    ledger: &mut FlopLedger,
) -> Result<SketchSet<T>> {
    check_sketch_shapes(a, r)?;
    let d = a.order();
    let mut rev = Vec::with_capacity(d - 1);
    let mut w = matmul_nt(
        &a.cores()[d - 1].horizontal(),
        &r.cores()[d - 1].horizontal(),
        ledger,
    )?;
    for k in (1..d - 1).rev() {
        let core = &a.cores()[k];
        let v = matmul(&core.vertical(), &w, ledger)?;
        let b = TtCore::from_vertical(v, core.left_rank(), core.mode_size())?;
        let next = matmul_nt(&b.horizontal(), &r.cores()[k].horizontal(), ledger)?;
        rev.push(w);
        w = next;
    }
    rev.push(w);
    Ok(SketchSet::from_rev(rev))
}

/// Same sketches from the slice form `W^(k−1) = Σ_i A^(k)(i)·W^(k)·R^(k)(i)ᵀ`.
pub fn partial_contraction_rl_slices<T: Scalar>(
    a: &TtTensor<T>,
    r: &TtTensor<T>,
    ledger: &mut FlopLedger,
) -> Result<SketchSet<T>> {
    check_sketch_shapes(a, r)?;
    let d = a.order();
    let mut rev = Vec::with_capacity(d - 1);
    let mut w = Matrix::identity(1);
    for k in (1..d).rev() {
        let (ca, cr) = (&a.cores()[k], &r.cores()[k]);
        let mut next = Matrix::zeros(ca.left_rank(), cr.left_rank());
        for (sa, sr) in ca.slices().iter().zip(cr.slices()) {
            let aw = matmul(sa, &w, ledger)?;
            next = next.add(&matmul_nt(&aw, &sr, ledger)?)?;
        }
        if k < d - 1 {
            rev.push(w);
        }
        w = next;
    }
    rev.push(w);
    Ok(SketchSet::from_rev(rev))
}
