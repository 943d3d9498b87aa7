use crate::error::{shape_err, Result};
use crate::linalg::{matmul, matmul_nt, FlopLedger, Matrix};
use crate::Scalar;

/// `(A⊗B)·v` computed as `vec(B·V·Aᵀ)`, where `V` is `v` reshaped
/// column-wise into an `s×n` matrix. The Kronecker product is never formed.
pub fn kron_apply_vec<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    v: &[T],
    ledger: &mut FlopLedger,
) -> Result<Vec<T>> {
    let (_, n) = a.shape();
    let (_, s) = b.shape();
    if v.len() != n * s {
        return shape_err(format!(
            "vector of length {} does not match Kronecker operand with {} columns",
            v.len(),
            n * s
        ));
    }
    let folded = Matrix::from_col_major(s, n, v.to_vec())?;
    let bv = matmul(b, &folded, ledger)?;
    Ok(matmul_nt(&bv, a, ledger)?.into_vec())
}

/// Explicit `A⊗B` with `(A⊗B)(i·r + k, j·s + l) = A(i,j)·B(k,l)`.
pub fn kron_matrix<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (r, s) = b.shape();
    Matrix::from_fn(a.rows() * r, a.cols() * s, |row, col| {
        a[(row / r, col / s)] * b[(row % r, col % s)]
    })
}
