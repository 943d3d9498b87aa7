use crate::error::{Error, Result};
use crate::linalg::{econ_qr, matmul, FlopLedger, Matrix};
use crate::Scalar;

const MAX_SWEEPS: usize = 80;

/// How many singular triplets [`truncated_svd`] keeps.
///
/// With `target_rank` set, exactly `min(target_rank, max_terms)` leading
/// triplets are returned (including numerically zero ones). Without it the
/// numeric rank is used: `σ_i > rank_tol·σ_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdOptions {
    pub target_rank: Option<usize>,
    pub max_terms: Option<usize>,
    pub rank_tol: f64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            target_rank: None,
            max_terms: None,
            rank_tol: 1e-12,
        }
    }
}

impl SvdOptions {
    pub fn rank(target: usize) -> Self {
        Self {
            target_rank: Some(target),
            ..Self::default()
        }
    }

    pub fn full() -> Self {
        Self {
            rank_tol: 0.0,
            ..Self::default()
        }
    }
}

/// Thin SVD factors `x ≈ u·diag(s)·vᵀ`.
#[derive(Debug, Clone)]
pub struct SvdResult<T> {
    /// `m×R`, orthonormal columns.
    pub u: Matrix<T>,
    /// Nonincreasing, nonnegative, length `R`.
    pub s: Vec<T>,
    /// `n×R`, orthonormal columns.
    pub v: Matrix<T>,
    /// Frobenius norm of the dropped singular values.
    pub discarded: T,
}

impl<T: Scalar> SvdResult<T> {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    /// `u·diag(s)·vᵀ`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let mut us = self.u.clone();
        for (j, &sj) in self.s.iter().enumerate() {
            us.col_mut(j).iter_mut().for_each(|x| *x *= sj);
        }
        crate::linalg::matmul_nt(&us, &self.v, &mut FlopLedger::new()).expect("conformant factors")
    }
}

/// Truncated SVD by QR-preconditioned one-sided Jacobi.
///
/// Singular values come out sorted in nonincreasing order; ties keep the
/// earlier-indexed triplet. The first nonzero entry of each `u` column is
/// made nonnegative. The SVD bucket of the ledger is charged
/// [`crate::linalg::SVD_FLOP_CONSTANT`]`·m·n²`.
pub fn truncated_svd<T: Scalar>(
    x: &Matrix<T>,
    opts: SvdOptions,
    ledger: &mut FlopLedger,
) -> Result<SvdResult<T>> {
    x.ensure_finite("SVD input")?;
    let (m, n) = x.shape();
    if let Some(t) = opts.target_rank {
        if t > m.min(n) {
            return Err(Error::Domain(format!(
                "target rank {t} exceeds min dimension of a {m}x{n} matrix"
            )));
        }
    }
    let (u, s, v) = if m >= n {
        full_thin_svd(x)?
    } else {
        let (u, s, v) = full_thin_svd(&x.transpose())?;
        (v, s, u)
    };
    ledger.charge_svd(m, n);

    let sigma1 = s.first().copied().unwrap_or_else(T::zero);
    let keep = match opts.target_rank {
        Some(t) => t,
        None => {
            let cut = T::rel_tol(opts.rank_tol) * sigma1;
            if opts.rank_tol == 0.0 {
                s.iter().filter(|&&x| x > T::zero()).count()
            } else {
                s.iter().filter(|&&x| x > cut).count()
            }
        }
    };
    let keep = keep.min(opts.max_terms.unwrap_or(usize::MAX)).min(s.len());
    let discarded = s[keep..].iter().map(|&x| x * x).sum::<T>().sqrt();
    Ok(SvdResult {
        u: u.col_range(0, keep),
        s: s[..keep].to_vec(),
        v: v.col_range(0, keep),
        discarded,
    })
}

/// Full thin SVD of a tall (`m ≥ n`) matrix, sorted, sign-normalised.
fn full_thin_svd<T: Scalar>(x: &Matrix<T>) -> Result<(Matrix<T>, Vec<T>, Matrix<T>)> {
    let (m, n) = x.shape();
    if n == 0 {
        return Ok((Matrix::zeros(m, 0), Vec::new(), Matrix::zeros(0, 0)));
    }
    let mut scratch = FlopLedger::new();
    // Jacobi on the triangular factor; the orthogonal factor is reapplied
    // at the end.
    let pre = if m > n {
        Some(econ_qr(x, &mut scratch)?)
    } else {
        None
    };
    let mut g = match &pre {
        Some(qr) => qr.r.clone(),
        None => x.clone(),
    };
    let mut v = Matrix::identity(n);
    jacobi_sweeps(&mut g, &mut v);

    let norms: Vec<T> = (0..n)
        .map(|j| crate::linalg::matrix::frobenius(g.col(j)))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps earlier columns first among equal values.
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).expect("finite norms"));

    let rows = g.rows();
    let mut u_small = Matrix::zeros(rows, n);
    let mut v_sorted = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let tiny = T::min_positive_value().sqrt();
    let mut needs_completion = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        s.push(sigma);
        v_sorted.col_mut(dst).copy_from_slice(v.col(src));
        if sigma > tiny {
            for (o, &gi) in u_small.col_mut(dst).iter_mut().zip(g.col(src)) {
                *o = gi / sigma;
            }
        } else {
            needs_completion.push(dst);
        }
    }
    complete_orthonormal(&mut u_small, &needs_completion);

    let mut u = match &pre {
        Some(qr) => matmul(&qr.q, &u_small, &mut scratch)?,
        None => u_small,
    };

    for j in 0..n {
        let col = u.col(j);
        let peak = col.iter().fold(T::zero(), |a, b| a.max(b.abs()));
        let thresh = peak * T::epsilon() * T::of(16.0);
        let flip = col
            .iter()
            .find(|x| x.abs() > thresh)
            .is_some_and(|&x| x < T::zero());
        if flip {
            u.col_mut(j).iter_mut().for_each(|x| *x = -*x);
            v_sorted.col_mut(j).iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok((u, s, v_sorted))
}

/// Hestenes one-sided Jacobi: rotates column pairs of `g` until all are
/// mutually orthogonal to working precision, accumulating rotations in `v`.
fn jacobi_sweeps<T: Scalar>(g: &mut Matrix<T>, v: &mut Matrix<T>) {
    let n = g.cols();
    let rows = g.rows();
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                {
                    let gp = g.col(p);
                    let gq = g.col(q);
                    for i in 0..rows {
                        alpha += gp[i] * gp[i];
                        beta += gq[i] * gq[i];
                        gamma += gp[i] * gq[i];
                    }
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(g, p, q, c, s);
                rotate(v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
}

#[inline]
fn rotate<T: Scalar>(a: &mut Matrix<T>, p: usize, q: usize, c: T, s: T) {
    let rows = a.rows();
    let data = a.as_mut_slice();
    let (lo, hi) = data.split_at_mut(q * rows);
    let cp = &mut lo[p * rows..(p + 1) * rows];
    let cq = &mut hi[..rows];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Fills the listed columns with unit vectors orthogonal to every other
/// column (Gram–Schmidt on the standard basis, applied twice).
fn complete_orthonormal<T: Scalar>(u: &mut Matrix<T>, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let rows = u.rows();
    let mut filled: Vec<usize> = (0..u.cols()).filter(|j| !missing.contains(j)).collect();
    let mut candidate = 0;
    for &target in missing {
        loop {
            assert!(candidate < rows, "cannot complete orthonormal basis");
            let mut w = vec![T::zero(); rows];
            w[candidate] = T::one();
            candidate += 1;
            for _ in 0..2 {
                for &j in &filled {
                    let col = u.col(j);
                    let proj = col.iter().zip(&w).fold(T::zero(), |a, (&c, &x)| a + c * x);
                    for (wi, &ci) in w.iter_mut().zip(col) {
                        *wi -= proj * ci;
                    }
                }
            }
            let norm = crate::linalg::matrix::frobenius(&w);
            if norm > T::of(0.5) {
                for (o, wi) in u.col_mut(target).iter_mut().zip(&w) {
                    *o = *wi / norm;
                }
                filled.push(target);
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pseudo_random(m: usize, n: usize, seed: u64) -> Matrix<f64> {
        let mut s = seed ^ 0x9E37_79B9_7F4A_7C15;
        Matrix::from_fn(m, n, |_, _| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
    }

    #[test]
    fn diagonal_matrix_truncated_to_two() {
        let x = Matrix::<f64>::from_rows(&[&[3.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 1.0]])
            .unwrap();
        let svd = truncated_svd(&x, SvdOptions::rank(2), &mut FlopLedger::new()).unwrap();
        assert_eq!(svd.rank(), 2);
        assert!((svd.s[0] - 3.0).abs() < 1e-15 && (svd.s[1] - 2.0).abs() < 1e-15);
        assert!((svd.discarded - 1.0).abs() < 1e-15);
        let err = svd.reconstruct().sub(&x).unwrap().frobenius_norm();
        assert!((err - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_matrix_detected() {
        let u = [1.0, -2.0, 0.5, 3.0];
        let v = [2.0, 1.0, -1.0];
        let x = Matrix::from_fn(4, 3, |i, j| u[i] * v[j]);
        let svd = truncated_svd(&x, SvdOptions::default(), &mut FlopLedger::new()).unwrap();
        assert_eq!(svd.rank(), 1);
        assert!(svd.reconstruct().sub(&x).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn full_svd_of_random_reconstructs() {
        for (m, n) in [(8, 5), (5, 8), (6, 6), (40, 3)] {
            let x = pseudo_random(m, n, (m * 31 + n) as u64);
            let svd = truncated_svd(&x, SvdOptions::full(), &mut FlopLedger::new()).unwrap();
            assert_eq!(svd.rank(), m.min(n));
            let rel = svd.reconstruct().sub(&x).unwrap().frobenius_norm() / x.frobenius_norm();
            assert!(rel < 1e-13, "{m}x{n}: {rel}");
            assert!(svd.u.orthonormality_defect() < 1e-13);
            assert!(svd.v.orthonormality_defect() < 1e-13);
            assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn max_terms_caps_and_reports_tail() {
        let x = pseudo_random(7, 6, 2);
        let full = truncated_svd(&x, SvdOptions::full(), &mut FlopLedger::new()).unwrap();
        let opts = SvdOptions {
            max_terms: Some(2),
            ..SvdOptions::default()
        };
        let cut = truncated_svd(&x, opts, &mut FlopLedger::new()).unwrap();
        assert_eq!(cut.rank(), 2);
        let tail: f64 = full.s[2..].iter().map(|s| s * s).sum::<f64>().sqrt();
        assert!((cut.discarded - tail).abs() < 1e-13);
        let err = cut.reconstruct().sub(&x).unwrap().frobenius_norm();
        assert!((err - tail).abs() < 1e-12);
    }

    #[test]
    fn target_rank_keeps_null_directions_orthonormal() {
        let x = Matrix::from_fn(5, 4, |i, j| if j == 0 { i as f64 + 1.0 } else { 0.0 });
        let svd = truncated_svd(&x, SvdOptions::rank(3), &mut FlopLedger::new()).unwrap();
        assert_eq!(svd.rank(), 3);
        assert!(svd.u.orthonormality_defect() < 1e-14);
        assert_eq!(svd.s[1], 0.0);
    }

    #[test]
    fn sign_convention() {
        let x = pseudo_random(6, 4, 9);
        let svd = truncated_svd(&x, SvdOptions::full(), &mut FlopLedger::new()).unwrap();
        for j in 0..svd.rank() {
            let first = svd.u.col(j).iter().find(|v| v.abs() > 1e-12).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn target_above_min_dim_is_rejected() {
        let x = pseudo_random(3, 2, 1);
        assert!(truncated_svd(&x, SvdOptions::rank(3), &mut FlopLedger::new()).is_err());
    }

    #[test]
    fn charges_svd_bucket_only() {
        let mut l = FlopLedger::new();
        truncated_svd(&pseudo_random(10, 4, 3), SvdOptions::default(), &mut l).unwrap();
        assert_eq!(l.svd_flops, crate::linalg::SVD_FLOP_CONSTANT * 10 * 16);
        assert_eq!(l.measured(), 0);
    }
}
