use crate::error::Result;
use crate::linalg::{econ_qr, lq, matmul, truncated_svd, FlopLedger, SvdOptions};
use crate::recompress::feasible_targets;
use crate::tensor::{RankChain, TtCore, TtTensor};
use crate::Scalar;

/// Deterministic TT-Rounding: a right-to-left LQ orthogonalization sweep,
/// then a left-to-right QR + truncated SVD sweep cutting bond `k` to `ℓ_k`.
///
/// Bond ranks may shrink during orthogonalization when an unfolding is
/// wider than tall. Cores `1..d−1` of the result are left-orthogonal.
pub fn tt_rounding<T: Scalar>(
    a: &TtTensor<T>,
    targets: &RankChain,
    ledger: &mut FlopLedger,
) -> Result<TtTensor<T>> {
    let targets = feasible_targets(&a.shape(), &a.ranks(), targets)?;
    let d = a.order();
    let mut cores: Vec<TtCore<T>> = a.cores().to_vec();
    if d == 1 {
        return TtTensor::new(cores);
    }

    for k in (1..d).rev() {
        let n = cores[k].mode_size();
        let right = cores[k].right_rank();
        let f = lq(&cores[k].horizontal(), ledger)?;
        cores[k] = TtCore::from_horizontal(&f.q, n, right)?;
        let prev = &cores[k - 1];
        let (left, pn) = (prev.left_rank(), prev.mode_size());
        let v = matmul(&prev.vertical(), &f.l, ledger)?;
        cores[k - 1] = TtCore::from_vertical(v, left, pn)?;
    }

    for k in 0..d - 1 {
        let (left, n, right) = cores[k].dims();
        let f = econ_qr(&cores[k].vertical(), ledger)?;
        let keep = targets[k + 1].min(f.r.rows()).min(right);
        let svd = truncated_svd(&f.r, SvdOptions::rank(keep), ledger)?;
        let u = matmul(&f.q, &svd.u, ledger)?;
        cores[k] = TtCore::from_vertical(u, left, n)?;

        let mut sv = svd.v.transpose();
        for (row, &sigma) in svd.s.iter().enumerate() {
            for c in 0..sv.cols() {
                sv[(row, c)] *= sigma;
            }
        }
        ledger.charge_elementwise(sv.rows() * sv.cols());
        let next = &cores[k + 1];
        let (nn, nr) = (next.mode_size(), next.right_rank());
        let h = matmul(&sv, &next.horizontal(), ledger)?;
        cores[k + 1] = TtCore::from_horizontal(&h, nn, nr)?;
    }
    TtTensor::new(cores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_tt, RandomSpec};
    use crate::tensor::{relative_error, Shape};

    fn rand_tt(d: usize, n: usize, r: usize, seed: u64) -> TtTensor<f64> {
        random_tt(&RandomSpec::gaussian(
            Shape::uniform(d, n).unwrap(),
            RankChain::uniform(d, r).unwrap(),
            seed,
        ))
        .unwrap()
    }

    #[test]
    fn lossless_when_targets_dominate() {
        let a = rand_tt(4, 3, 3, 1);
        let out = tt_rounding(
            &a,
            &RankChain::uniform(4, 5).unwrap(),
            &mut FlopLedger::new(),
        )
        .unwrap();
        assert!(relative_error(&out, &a).unwrap() < 1e-12);
        assert!(out.max_left_orthogonality_defect() < 1e-12);
    }

    #[test]
    fn truncation_respects_targets() {
        let a = rand_tt(5, 3, 4, 2);
        let t = RankChain::uniform(5, 2).unwrap();
        let out = tt_rounding(&a, &t, &mut FlopLedger::new()).unwrap();
        assert!(out.ranks().dominated_by(&t));
        assert!(out.max_left_orthogonality_defect() < 1e-12);
        let err = relative_error(&out, &a).unwrap();
        assert!(err > 0.0 && err < 1.0);
    }

    #[test]
    fn single_core_passthrough() {
        let a = rand_tt(1, 4, 1, 3);
        let out = tt_rounding(
            &a,
            &RankChain::uniform(1, 1).unwrap(),
            &mut FlopLedger::new(),
        )
        .unwrap();
        assert_eq!(out, a);
    }
}
