use crate::error::{shape_err, Result};
use crate::linalg::{econ_qr, matmul, matmul_tn, FlopLedger};
use crate::random::{random_tt, RandomSpec};
use crate::recompress::{feasible_targets, partial_contraction_rl};
use crate::tensor::{RankChain, TtCore, TtTensor};
use crate::Scalar;

/// Randomize-then-orthogonalize: sketches `a` against a Gaussian TT with
/// ranks `targets` drawn from `seed`, then sweeps left to right.
pub fn rand_orth<T: Scalar>(
    a: &TtTensor<T>,
    targets: &RankChain,
    seed: u64,
    ledger: &mut FlopLedger,
) -> Result<TtTensor<T>> {
    let targets = feasible_targets(&a.shape(), &a.ranks(), targets)?;
    if a.order() == 1 {
        return Ok(a.clone());
    }
    let r = random_tt(&RandomSpec::gaussian(a.shape(), targets, seed))?;
    rand_orth_with_sketch(a, &r, ledger)
}

/// [`rand_orth`] with a caller-supplied sketch tensor; its ranks are the
/// output ranks.
pub fn rand_orth_with_sketch<T: Scalar>(
    a: &TtTensor<T>,
    r: &TtTensor<T>,
    ledger: &mut FlopLedger,
) -> Result<TtTensor<T>> {
    let w = partial_contraction_rl(a, r, ledger)?;
    let d = a.order();
    let mut out = Vec::with_capacity(d);
    let mut x = a.cores()[0].clone();
    for k in 1..d {
        let (left, n, _) = x.dims();
        let v = x.into_vertical();
        let sketched = matmul(&v, w.get(k), ledger)?;
        if sketched.rows() < sketched.cols() {
            return shape_err(format!(
                "bond {k}: sketch rank {} exceeds unfolding height {}",
                sketched.cols(),
                sketched.rows()
            ));
        }
        let q = econ_qr(&sketched, ledger)?.q;
        let m = matmul_tn(&q, &v, ledger)?;
        out.push(TtCore::from_vertical(q, left, n)?);
        let next = &a.cores()[k];
        let h = matmul(&m, &next.horizontal(), ledger)?;
        x = TtCore::from_horizontal(&h, next.mode_size(), next.right_rank())?;
    }
    out.push(x);
    TtTensor::new(out)
}
