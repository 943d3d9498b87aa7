use crate::error::Result;
use crate::linalg::{FlopLedger, Matrix};
use crate::Scalar;

/// Economy QR factors: `q` is `m×k` with orthonormal columns, `r` is `k×n`
/// upper triangular (trapezoidal when `m < n`), `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct QrResult<T> {
    pub q: Matrix<T>,
    pub r: Matrix<T>,
}

/// LQ factors: `l` is `m×k` lower triangular, `q` is `k×n` with orthonormal
/// rows.
#[derive(Debug, Clone)]
pub struct LqResult<T> {
    pub l: Matrix<T>,
    pub q: Matrix<T>,
}

/// Householder economy QR.
///
/// The diagonal of `r` is made nonnegative, so identical inputs always give
/// bit-identical factors. Rank-deficient inputs are fine: a zero column
/// yields a zero diagonal entry and `q` stays orthonormal. The ledger is
/// charged `4mn² − 4n³/3` (see [`FlopLedger::charge_qr`]) whether or not the
/// caller uses `r`.
pub fn econ_qr<T: Scalar>(x: &Matrix<T>, ledger: &mut FlopLedger) -> Result<QrResult<T>> {
    x.ensure_finite("QR input")?;
    let (m, n) = x.shape();
    let k = m.min(n);
    let mut a = x.clone();
    let mut reflectors: Vec<Vec<T>> = Vec::with_capacity(k);

    for j in 0..k {
        let v = {
            let col = &a.col(j)[j..];
            householder_vector(col)
        };
        if let Some(v) = &v {
            for c in j..n {
                apply_reflector(v, &mut a.col_mut(c)[j..]);
            }
        }
        reflectors.push(v.unwrap_or_default());
    }

    let mut r = Matrix::zeros(k, n);
    for c in 0..n {
        for i in 0..k.min(c + 1) {
            r[(i, c)] = a[(i, c)];
        }
    }

    let mut q = Matrix::zeros(m, k);
    for j in 0..k {
        q[(j, j)] = T::one();
    }
    for (j, v) in reflectors.iter().enumerate().rev() {
        if v.is_empty() {
            continue;
        }
        for c in j..k {
            apply_reflector(v, &mut q.col_mut(c)[j..]);
        }
    }

    for j in 0..k {
        if r[(j, j)] < T::zero() {
            for c in j..n {
                r[(j, c)] = -r[(j, c)];
            }
            for v in q.col_mut(j) {
                *v = -*v;
            }
        }
    }

    ledger.charge_qr(m, n);
    Ok(QrResult { q, r })
}

/// LQ factorisation computed as the QR of `xᵀ`.
pub fn lq<T: Scalar>(x: &Matrix<T>, ledger: &mut FlopLedger) -> Result<LqResult<T>> {
    let QrResult { q, r } = econ_qr(&x.transpose(), ledger)?;
    Ok(LqResult {
        l: r.transpose(),
        q: q.transpose(),
    })
}

/// Unit Householder vector mapping `x` onto a multiple of `e1`, or `None`
/// when `x` is already zero.
fn householder_vector<T: Scalar>(x: &[T]) -> Option<Vec<T>> {
    let norm = crate::linalg::matrix::frobenius(x);
    if norm == T::zero() {
        return None;
    }
    let alpha = if x[0] >= T::zero() { -norm } else { norm };
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vnorm = crate::linalg::matrix::frobenius(&v);
    if vnorm == T::zero() {
        return None;
    }
    v.iter_mut().for_each(|e| *e /= vnorm);
    Some(v)
}

/// `y ← (I − 2vvᵀ) y`.
#[inline]
fn apply_reflector<T: Scalar>(v: &[T], y: &mut [T]) {
    let dot = v
        .iter()
        .zip(y.iter())
        .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
    let two_dot = dot + dot;
    for (yi, &vi) in y.iter_mut().zip(v) {
        *yi -= two_dot * vi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matmul;
    use crate::Error;

    fn pseudo_random(m: usize, n: usize, seed: u64) -> Matrix<f64> {
        let mut s = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        Matrix::from_fn(m, n, |_, _| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    #[test]
    fn identity_factors_to_identity() {
        let mut l = FlopLedger::new();
        let QrResult { q, r } = econ_qr(&Matrix::<f64>::identity(4), &mut l).unwrap();
        assert_eq!(q, Matrix::identity(4));
        assert_eq!(r, Matrix::identity(4));
    }

    #[test]
    fn column_three_four() {
        let x = Matrix::<f64>::from_rows(&[&[3.0], &[4.0]]).unwrap();
        let QrResult { q, r } = econ_qr(&x, &mut FlopLedger::new()).unwrap();
        assert!((q[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((q[(1, 0)] - 0.8).abs() < 1e-15);
        assert!((r[(0, 0)] - 5.0).abs() < 1e-15);
    }

    #[test]
    fn random_tall_matrix_is_orthonormal_and_reconstructs() {
        let x = pseudo_random(20, 5, 7);
        let mut l = FlopLedger::new();
        let QrResult { q, r } = econ_qr(&x, &mut l).unwrap();
        assert!(q.orthonormality_defect() <= 1e-13);
        let back = matmul(&q, &r, &mut l).unwrap();
        assert!(back.sub(&x).unwrap().frobenius_norm() / x.frobenius_norm() <= 1e-13);
        for i in 0..5 {
            assert!(r[(i, i)] >= 0.0);
            for j in 0..i {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn wide_matrix_gives_trapezoidal_r() {
        let x = pseudo_random(3, 7, 3);
        let mut l = FlopLedger::new();
        let QrResult { q, r } = econ_qr(&x, &mut l).unwrap();
        assert_eq!(q.shape(), (3, 3));
        assert_eq!(r.shape(), (3, 7));
        let back = matmul(&q, &r, &mut l).unwrap();
        assert!(back.sub(&x).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_input_keeps_orthonormal_q() {
        let mut x = pseudo_random(6, 4, 11);
        for i in 0..6 {
            x[(i, 2)] = x[(i, 0)] * 2.0;
            x[(i, 3)] = 0.0;
        }
        let mut l = FlopLedger::new();
        let QrResult { q, r } = econ_qr(&x, &mut l).unwrap();
        assert!(q.orthonormality_defect() < 1e-13);
        let back = matmul(&q, &r, &mut l).unwrap();
        assert!(back.sub(&x).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn deterministic_bitwise() {
        let x = pseudo_random(9, 4, 5);
        let a = econ_qr(&x, &mut FlopLedger::new()).unwrap();
        let b = econ_qr(&x, &mut FlopLedger::new()).unwrap();
        assert_eq!(a.q.as_slice(), b.q.as_slice());
        assert_eq!(a.r.as_slice(), b.r.as_slice());
    }

    #[test]
    fn non_finite_is_numeric_error() {
        let mut x = Matrix::<f64>::identity(2);
        x[(1, 0)] = f64::NAN;
        assert!(matches!(
            econ_qr(&x, &mut FlopLedger::new()),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn lq_examples() {
        let mut l = FlopLedger::new();
        let LqResult { l: lo, q } = lq(&Matrix::<f64>::identity(3), &mut l).unwrap();
        assert_eq!(lo, Matrix::identity(3));
        assert_eq!(q, Matrix::identity(3));

        let row = Matrix::<f64>::from_rows(&[&[3.0, 4.0]]).unwrap();
        let LqResult { l: lo, q } = lq(&row, &mut l).unwrap();
        assert!((lo[(0, 0)] - 5.0).abs() < 1e-15);
        assert!((q[(0, 0)] - 0.6).abs() < 1e-15 && (q[(0, 1)] - 0.8).abs() < 1e-15);

        let x = pseudo_random(4, 9, 13);
        let LqResult { l: lo, q } = lq(&x, &mut l).unwrap();
        let back = matmul(&lo, &q, &mut l).unwrap();
        assert!(back.sub(&x).unwrap().frobenius_norm() / x.frobenius_norm() <= 1e-13);
        assert!(q.transpose().orthonormality_defect() < 1e-13);
    }

    #[test]
    fn qr_charges_formula() {
        let mut l = FlopLedger::new();
        econ_qr(&pseudo_random(20, 5, 1), &mut l).unwrap();
        assert_eq!(l.qr_flops, 1833);
        assert_eq!(l.matmul_flops, 0);
    }
}
