use crate::error::{shape_err, Error, Result};
use crate::linalg::{
    kron_apply_vec, matmul, matmul_nt, truncated_svd, FlopLedger, Matrix, SvdOptions,
};
use crate::recompress::sketch::{check_sketch_shapes, SketchSet};
use crate::tensor::{pkp_cores, TtTensor};
use crate::Scalar;

/// How a sketch matrix is split into rank-1 terms before the next
/// contraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HpcrlVariant {
    /// Truncated SVD: keep `σ > rel_tol·σ_1`, then at most `max_terms`.
    Svd {
        max_terms: Option<usize>,
        rel_tol: f64,
    },
    /// The columns of the sketch themselves; costs nothing.
    Direct,
}

pub const DEFAULT_SVD_REL_TOL: f64 = 1e-10;

impl HpcrlVariant {
    pub fn svd(max_terms: Option<usize>) -> Self {
        Self::Svd {
            max_terms,
            rel_tol: DEFAULT_SVD_REL_TOL,
        }
    }

    /// SVD variant keeping every nonzero singular value.
    pub fn svd_exact() -> Self {
        Self::Svd {
            max_terms: None,
            rel_tol: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Svd {
                max_terms: Some(0), ..
            } => Err(Error::Usage("max_terms must be at least 1".into())),
            Self::Svd { rel_tol, .. } if !(*rel_tol >= 0.0) => Err(Error::Usage(format!(
                "rel_tol must be nonnegative, got {rel_tol}"
            ))),
            _ => Ok(()),
        }
    }
}

/// `W ≈ U·diag(sigma)·Vᵀ` as a sum of rank-1 terms.
#[derive(Debug, Clone)]
pub struct Rank1Rep<T> {
    pub u: Matrix<T>,
    pub sigma: Vec<T>,
    pub v: Matrix<T>,
    /// Frobenius norm of what the representation drops.
    pub discarded: T,
    /// `v` is the identity and `sigma` all ones.
    pub direct: bool,
}

impl<T: Scalar> Rank1Rep<T> {
    pub fn terms(&self) -> usize {
        self.sigma.len()
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        let mut us = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            us.col_mut(j).iter_mut().for_each(|x| *x *= s);
        }
        matmul_nt(&us, &self.v, &mut FlopLedger::new()).expect("conformant factors")
    }
}

pub fn rank1_decompose<T: Scalar>(
    w: &Matrix<T>,
    variant: HpcrlVariant,
    ledger: &mut FlopLedger,
) -> Result<Rank1Rep<T>> {
    variant.validate()?;
    match variant {
        HpcrlVariant::Direct => {
            let l = w.cols();
            Ok(Rank1Rep {
                u: w.clone(),
                sigma: vec![T::one(); l],
                v: Matrix::identity(l),
                discarded: T::zero(),
                direct: true,
            })
        }
        HpcrlVariant::Svd { max_terms, rel_tol } => {
            let svd = truncated_svd(
                w,
                SvdOptions {
                    target_rank: None,
                    max_terms,
                    rank_tol: rel_tol,
                },
                ledger,
            )?;
            Ok(Rank1Rep {
                u: svd.u,
                sigma: svd.s,
                v: svd.v,
                discarded: svd.discarded,
                direct: false,
            })
        }
    }
}

/// Partial contractions of the implicit Hadamard product `Y ⊙ Z` against
/// the sketch tensor `r`, computed from the factor cores.
///
/// For each bond the previous sketch is split into rank-1 terms `u_γ v_γᵀ`;
/// column `γ + R·i` of `W_L` is `(Y(i) ⊗ Z(i))·u_γ`, evaluated as
/// `vec(Z(i)·U_γ·Y(i)ᵀ)`, and column `γ + R·i` of `W_R` is `R(i)·v_γ`.
/// Then `W^(k−1) = W_L·(I ⊗ S)·W_Rᵀ`. Only the last product core, of size
/// `r s × n × 1`, is ever formed.
pub fn hpcrl<T: Scalar>(
    y: &TtTensor<T>,
    z: &TtTensor<T>,
    r: &TtTensor<T>,
    variant: HpcrlVariant,
    ledger: &mut FlopLedger,
) -> Result<SketchSet<T>> {
    check_sketch_shapes(y, r)?;
    check_sketch_shapes(z, r)?;
    let d = y.order();
    let last = pkp_cores(&y.cores()[d - 1], &z.cores()[d - 1])?;
    let mut w = matmul_nt(&last.horizontal(), &r.cores()[d - 1].horizontal(), ledger)?;
    let mut rev = Vec::with_capacity(d - 1);

    for k in (1..d - 1).rev() {
        let (cy, cz, cr) = (&y.cores()[k], &z.cores()[k], &r.cores()[k]);
        if w.rows() != cy.right_rank() * cz.right_rank() {
            return shape_err(format!("sketch at bond {} has {} rows", k + 1, w.rows()));
        }
        let rep = rank1_decompose(&w, variant, ledger)?;
        let terms = rep.terms();
        let n = cy.mode_size();
        let rows = cy.left_rank() * cz.left_rank();
        let mut wl = Matrix::zeros(rows, n * terms);
        let mut wr = Matrix::zeros(cr.left_rank(), n * terms);
        for i in 1..=n {
            let (ys, zs, rs) = (cy.slice(i), cz.slice(i), cr.slice(i));
            for g in 0..terms {
                let col = g + terms * (i - 1);
                let v = kron_apply_vec(&ys, &zs, rep.u.col(g), ledger)?;
                wl.col_mut(col).copy_from_slice(&v);
            }
            if rep.direct {
                for g in 0..terms {
                    wr.col_mut(g + terms * (i - 1)).copy_from_slice(rs.col(g));
                }
            } else {
                let block = matmul(&rs, &rep.v, ledger)?;
                for g in 0..terms {
                    wr.col_mut(g + terms * (i - 1))
                        .copy_from_slice(block.col(g));
                }
            }
        }
        if !rep.direct {
            for i in 0..n {
                for (g, &s) in rep.sigma.iter().enumerate() {
                    wl.col_mut(g + terms * i).iter_mut().for_each(|x| *x *= s);
                }
            }
            ledger.charge_elementwise(rows * n * terms);
        }
        let next = matmul_nt(&wl, &wr, ledger)?;
        rev.push(w);
        w = next;
    }
    rev.push(w);
    Ok(SketchSet::from_rev(rev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_tt, RandomSpec};
    use crate::recompress::partial_contraction_rl;
    use crate::tensor::{tt_hadamard, RankChain, Shape};

    fn rand_tt(ranks: &[usize], n: usize, seed: u64) -> TtTensor<f64> {
        random_tt(&RandomSpec::gaussian(
            Shape::uniform(ranks.len() - 1, n).unwrap(),
            RankChain::new(ranks.to_vec()).unwrap(),
            seed,
        ))
        .unwrap()
    }

    #[test]
    fn direct_rep_is_exact() {
        let w = Matrix::from_fn(6, 3, |i, j| (i as f64 - j as f64 * 0.7).sin());
        let rep = rank1_decompose(&w, HpcrlVariant::Direct, &mut FlopLedger::new()).unwrap();
        assert_eq!(rep.reconstruct(), w);
        assert_eq!(rep.terms(), 3);
        let mut l = FlopLedger::new();
        rank1_decompose(&w, HpcrlVariant::Direct, &mut l).unwrap();
        assert_eq!(l, FlopLedger::new());
    }

    #[test]
    fn svd_rep_of_rank_one() {
        let w = Matrix::from_fn(5, 4, |i, j| (i as f64 + 1.0) * (2.0 - j as f64));
        let rep = rank1_decompose(&w, HpcrlVariant::svd(None), &mut FlopLedger::new()).unwrap();
        assert_eq!(rep.terms(), 1);
        assert!(rep.reconstruct().sub(&w).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn zero_max_terms_rejected() {
        let w = Matrix::<f64>::identity(2);
        let v = HpcrlVariant::Svd {
            max_terms: Some(0),
            rel_tol: 1e-10,
        };
        assert!(matches!(
            rank1_decompose(&w, v, &mut FlopLedger::new()),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn matches_explicit_hadamard_contraction() {
        let y = rand_tt(&[1, 3, 2, 3, 1], 3, 1);
        let z = rand_tt(&[1, 2, 3, 2, 1], 3, 2);
        let r = rand_tt(&[1, 4, 5, 3, 1], 3, 3);
        let oracle =
            partial_contraction_rl(&tt_hadamard(&y, &z).unwrap(), &r, &mut FlopLedger::new())
                .unwrap();
        let direct = hpcrl(&y, &z, &r, HpcrlVariant::Direct, &mut FlopLedger::new()).unwrap();
        assert!(direct.max_relative_distance(&oracle).unwrap() < 1e-12);
        let svd = hpcrl(
            &y,
            &z,
            &r,
            HpcrlVariant::svd_exact(),
            &mut FlopLedger::new(),
        )
        .unwrap();
        assert!(svd.max_relative_distance(&oracle).unwrap() < 1e-11);
    }

    #[test]
    fn ones_factor_reduces_to_plain_contraction() {
        let y = rand_tt(&[1, 3, 2, 1], 4, 5);
        let ones = TtTensor::ones(&y.shape());
        let r = rand_tt(&[1, 2, 2, 1], 4, 6);
        let plain = partial_contraction_rl(&y, &r, &mut FlopLedger::new()).unwrap();
        let had = hpcrl(&y, &ones, &r, HpcrlVariant::Direct, &mut FlopLedger::new()).unwrap();
        assert!(had.max_relative_distance(&plain).unwrap() < 1e-13);
    }
}
