use crate::error::{shape_err, Result};
use crate::linalg::{econ_qr, kron_apply_vec, matmul, matmul_tn, FlopLedger};
use crate::random::{random_tt, RandomSpec};
use crate::recompress::{feasible_targets, hpcrl, HpcrlVariant};
use crate::tensor::{pkp_cores, RankChain, TtCore, TtTensor};
use crate::Scalar;

/// `M ×¹ (Y ⊠ Z)` without forming the product core.
///
/// Row `γ` of slice `i` is `vec(Z(i)ᵀ·M_γ·Y(i))ᵀ`, where `M_γ` is row `γ`
/// of `m` reshaped column-wise to `s × r`. Costs
/// `n·ℓ·(s'(2s−1)r + s'(2r−1)r')` flops.
pub fn contract_m_onto_pkp<T: Scalar>(
    m: &crate::Matrix<T>,
    y: &TtCore<T>,
    z: &TtCore<T>,
    ledger: &mut FlopLedger,
) -> Result<TtCore<T>> {
    let (r0, n, r1) = y.dims();
    let (s0, nz, s1) = z.dims();
    if n != nz {
        return shape_err(format!("factor cores have modes {n} and {nz}"));
    }
    if m.cols() != r0 * s0 {
        return shape_err(format!(
            "{} columns cannot contract with ranks {r0}x{s0}",
            m.cols()
        ));
    }
    let l = m.rows();
    let mt = m.transpose();
    let width = r1 * s1;
    let mut h = crate::Matrix::zeros(l, n * width);
    for i in 1..=n {
        let (yt, zt) = (y.slice(i).transpose(), z.slice(i).transpose());
        for g in 0..l {
            let row = kron_apply_vec(&yt, &zt, mt.col(g), ledger)?;
            for (c, v) in row.into_iter().enumerate() {
                h[(g, c + width * (i - 1))] = v;
            }
        }
    }
    TtCore::from_horizontal(&h, n, width)
}

/// Recompresses `Y ⊙ Z` to `targets` without forming its interior cores.
///
/// Targets above the Hadamard ranks `r_k s_k` are clamped with a warning.
pub fn hatt<T: Scalar>(
    y: &TtTensor<T>,
    z: &TtTensor<T>,
    targets: &RankChain,
    variant: HpcrlVariant,
    seed: u64,
    ledger: &mut FlopLedger,
) -> Result<TtTensor<T>> {
    let bound = y.ranks().product(&z.ranks())?;
    let targets = feasible_targets(&y.shape(), &bound, targets)?;
    if y.order() == 1 {
        return TtTensor::new(vec![pkp_cores(&y.cores()[0], &z.cores()[0])?]);
    }
    let r = random_tt(&RandomSpec::gaussian(y.shape(), targets, seed))?;
    hatt_with_sketch(y, z, &r, variant, ledger)
}

/// [`hatt`] with a caller-supplied sketch tensor.
pub fn hatt_with_sketch<T: Scalar>(
    y: &TtTensor<T>,
    z: &TtTensor<T>,
    r: &TtTensor<T>,
    variant: HpcrlVariant,
    ledger: &mut FlopLedger,
) -> Result<TtTensor<T>> {
    let w = hpcrl(y, z, r, variant, ledger)?;
    let d = y.order();
    let mut out = Vec::with_capacity(d);
    let mut x = pkp_cores(&y.cores()[0], &z.cores()[0])?;
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
        x = contract_m_onto_pkp(&m, &y.cores()[k], &z.cores()[k], ledger)?;
    }
    out.push(x);
    TtTensor::new(out)
}
