use crate::error::{shape_err, Result};
use crate::linalg::{truncated_svd, FlopLedger, Matrix, SvdOptions};
use crate::tensor::{DenseTensor, RankChain, TtCore, TtTensor};
use crate::Scalar;

/// How [`tt_svd`] picks each bond rank.
#[derive(Debug, Clone, PartialEq)]
pub enum Truncation {
    /// At most these ranks.
    Ranks(RankChain),
    /// Drop tails below `tol/√(d−1)·‖X‖_F` per step, so the total error is
    /// at most `tol·‖X‖_F`.
    RelTol(f64),
}

/// Sequential unfold/truncate TT decomposition of a dense tensor.
pub fn tt_svd<T: Scalar>(
    x: &DenseTensor<T>,
    truncation: &Truncation,
    ledger: &mut FlopLedger,
) -> Result<TtTensor<T>> {
    let dims = x.shape().dims().to_vec();
    let d = dims.len();
    if let Truncation::Ranks(r) = truncation {
        if r.order() != d {
            return shape_err(format!("rank chain {r} does not fit {} modes", d));
        }
    }
    if d == 1 {
        return TtTensor::new(vec![TtCore::new(1, dims[0], 1, x.values().to_vec())?]);
    }
    let step_tol = match truncation {
        Truncation::RelTol(tol) => T::of(*tol / ((d - 1) as f64).sqrt()) * x.frobenius_norm(),
        Truncation::Ranks(_) => T::zero(),
    };

    // `rest` holds the remainder as (left rank) × (n_k ⋯ n_d), last index
    // fastest along the columns.
    let total: usize = dims.iter().product();
    let mut rest = Matrix::from_fn(1, total, |_, j| x.values()[j]);
    let mut left = 1;
    let mut cores = Vec::with_capacity(d);
    for k in 0..d - 1 {
        let n = dims[k];
        let cols = rest.cols() / n;
        // row i + n·α, column j  ←  rest(α, i·cols + j)
        let m = Matrix::from_fn(left * n, cols, |row, j| {
            rest[(row / n, (row % n) * cols + j)]
        });
        let full = truncated_svd(&m, SvdOptions::full(), ledger)?;
        let available = full.rank().max(1);
        let keep = match truncation {
            Truncation::Ranks(r) => r[k + 1].min(available),
            Truncation::RelTol(_) => {
                let mut keep = available;
                let mut tail = T::zero();
                while keep > 1 {
                    let s = full.s[keep - 1];
                    if (tail + s * s).sqrt() > step_tol {
                        break;
                    }
                    tail += s * s;
                    keep -= 1;
                }
                keep
            }
        };
        let (u, s, v) = if full.rank() == 0 {
            // zero remainder: keep a single null direction
            let mut u = Matrix::zeros(left * n, 1);
            u[(0, 0)] = T::one();
            (u, vec![T::zero()], Matrix::zeros(cols, 1))
        } else {
            (
                full.u.col_range(0, keep),
                full.s[..keep].to_vec(),
                full.v.col_range(0, keep),
            )
        };
        cores.push(TtCore::from_vertical(u, left, n)?);
        rest = Matrix::from_fn(keep, cols, |a, j| s[a] * v[(j, a)]);
        left = keep;
    }
    let n = dims[d - 1];
    cores.push(TtCore::from_fn(left, n, 1, |a, i, _| rest[(a - 1, i - 1)])?);
    TtTensor::new(cores)
}
