use crate::error::{Error, Result};
use crate::linalg::{matmul, matmul_tn, FlopLedger, Matrix};
use crate::recompress::Recompressor;
use crate::tensor::{
    tt_dot, tt_inner3, tt_norm, tt_scale, DenseTensor, Limits, RankChain, TtTensor,
};
use crate::Scalar;

/// Relative change of the Rayleigh estimate below which the iteration stops.
pub const POWER_STOP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerIterResult<T> {
    /// Best lower bound on the largest entry: the larger of `rayleigh` and
    /// the entry of `Y` at `argmax`.
    pub estimate: T,
    /// `⟨v, Y⊙v⟩/⟨v, v⟩` for the final iterate.
    pub rayleigh: T,
    /// 1-based index read off the per-mode marginals of `v⊙v`.
    pub argmax: Vec<usize>,
    /// Rank chain of the final iterate.
    pub ranks: RankChain,
    pub iterations_used: usize,
    /// Rayleigh estimate after each iteration.
    pub history: Vec<T>,
}

/// Power iteration `v ← recompress(Y⊙v, ℓ)/‖·‖` from the all-ones tensor.
///
/// Randomized backends use `seed + t` at iteration `t`.
pub fn power_iteration_max<T: Scalar>(
    y: &TtTensor<T>,
    ell: usize,
    max_iter: usize,
    recompressor: Recompressor,
    seed: u64,
    limits: &Limits,
    ledger: &mut FlopLedger,
) -> Result<PowerIterResult<T>> {
    if ell == 0 {
        return Err(Error::Usage("target rank must be at least 1".into()));
    }
    let targets = RankChain::uniform(y.order(), ell)?;
    let mut v = TtTensor::ones(&y.shape());
    let mut history: Vec<T> = Vec::with_capacity(max_iter);
    let mut rayleigh = rayleigh_quotient(y, &v)?;
    for t in 0..max_iter {
        let w =
            recompressor.hadamard(y, &v, &targets, seed.wrapping_add(t as u64), limits, ledger)?;
        let norm = tt_norm(&w);
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::Convergence(format!("iterate {t} has norm {norm:?}")));
        }
        v = tt_scale(&w, T::one() / norm);
        let next = rayleigh_quotient(y, &v)?;
        history.push(next);
        let done = (next - rayleigh).abs() <= T::of(POWER_STOP_TOL) * rayleigh.abs();
        rayleigh = next;
        if done {
            break;
        }
    }
    let argmax = marginal_argmax(&v)?;
    let at_argmax = y.evaluate(&argmax)?;
    Ok(PowerIterResult {
        estimate: at_argmax.max(rayleigh),
        rayleigh,
        argmax,
        ranks: v.ranks(),
        iterations_used: history.len(),
        history,
    })
}

fn rayleigh_quotient<T: Scalar>(y: &TtTensor<T>, v: &TtTensor<T>) -> Result<T> {
    Ok(tt_inner3(v, y, v)? / tt_dot(v, v)?)
}

/// For each mode, the index maximizing `Σ_{other indices} v²`.
pub fn marginal_argmax<T: Scalar>(v: &TtTensor<T>) -> Result<Vec<usize>> {
    let mut scratch = FlopLedger::new();
    let cores = v.cores();
    let d = cores.len();
    // left[k]: Gram of the first k cores, right[k]: Gram of cores k.. d−1
    let mut left = vec![Matrix::identity(1)];
    for core in cores.iter().take(d - 1) {
        let mut g = Matrix::zeros(core.right_rank(), core.right_rank());
        for s in core.slices() {
            let ls = matmul(left.last().unwrap(), &s, &mut scratch)?;
            g = g.add(&matmul_tn(&s, &ls, &mut scratch)?)?;
        }
        left.push(g);
    }
    let mut right = vec![Matrix::identity(1); d + 1];
    for k in (1..d).rev() {
        let core = &cores[k];
        let mut g = Matrix::zeros(core.left_rank(), core.left_rank());
        for s in core.slices() {
            let sr = matmul(&s, &right[k + 1], &mut scratch)?;
            g = g.add(&crate::linalg::matmul_nt(&sr, &s, &mut scratch)?)?;
        }
        right[k] = g;
    }
    let mut idx = Vec::with_capacity(d);
    for (k, core) in cores.iter().enumerate() {
        let mut best = (1, T::neg_infinity());
        for (i, s) in core.slices().iter().enumerate() {
            let g = matmul_tn(s, &matmul(&left[k], s, &mut scratch)?, &mut scratch)?;
            let w: T = g
                .as_slice()
                .iter()
                .zip(right[k + 1].as_slice())
                .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
            if w > best.1 {
                best = (i + 1, w);
            }
        }
        idx.push(best.0);
    }
    Ok(idx)
}

/// Exhaustive maximum with its 1-based index; ties go to the first index.
pub fn brute_force_max<T: Scalar>(x: &DenseTensor<T>) -> Result<(T, Vec<usize>)> {
    Ok(x.argmax())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apps::{separable_tt, FunctionKind, SeparableSpec};
    use crate::recompress::HpcrlVariant;
    use crate::tensor::{tt_to_dense, Shape, TtCore};

    fn rank_one(vals: &[&[f64]]) -> TtTensor<f64> {
        TtTensor::new(
            vals.iter()
                .map(|v| TtCore::new(1, v.len(), 1, v.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rank_one_unique_max() {
        let y = rank_one(&[
            &[0.5, 1.0, 2.0, 0.3],
            &[1.0, 3.0, 0.2, 0.7],
            &[0.9, 0.1, 0.4, 1.5],
        ]);
        let (max, at) = brute_force_max(&tt_to_dense(&y).unwrap()).unwrap();
        assert_eq!(at, vec![3, 2, 4]);
        for rc in [
            Recompressor::TtRounding,
            Recompressor::Hatt(HpcrlVariant::Direct),
        ] {
            let res = power_iteration_max(
                &y,
                2,
                100,
                rc,
                1,
                &Limits::default(),
                &mut FlopLedger::new(),
            )
            .unwrap();
            assert!((res.estimate - max).abs() <= 1e-6 * max, "{res:?}");
            assert!(res.iterations_used <= 100);
        }
    }

    #[test]
    fn scaling_y_scales_estimate() {
        let y = rank_one(&[&[0.5, 1.0, 2.0], &[1.0, 3.0, 0.2]]);
        let run = |y: &TtTensor<f64>| {
            power_iteration_max(
                y,
                1,
                30,
                Recompressor::RandOrth,
                4,
                &Limits::default(),
                &mut FlopLedger::new(),
            )
            .unwrap()
            .estimate
        };
        let a = run(&y);
        let b = run(&tt_scale(&y, 7.0));
        assert!((b - 7.0 * a).abs() <= 1e-12 * b);
    }

    #[test]
    fn qing_small_matches_oracle() {
        let spec = SeparableSpec {
            kind: FunctionKind::Qing,
            d: 3,
            n: 6,
        };
        let y = separable_tt::<f64>(&spec).unwrap();
        let (max, at) = brute_force_max(&spec.dense::<f64>(&Limits::default()).unwrap()).unwrap();
        let res = power_iteration_max(
            &y,
            3,
            100,
            Recompressor::TtRounding,
            0,
            &Limits::default(),
            &mut FlopLedger::new(),
        )
        .unwrap();
        assert_eq!(res.argmax, at);
        assert!((res.estimate - max).abs() <= 1e-3 * max);
        assert!(res.rayleigh <= max * (1.0 + 1e-12));
    }

    #[test]
    fn zero_tensor_fails_to_converge() {
        let y = rank_one(&[&[0.0, 0.0], &[1.0, 1.0]]);
        let err = power_iteration_max(
            &y,
            1,
            5,
            Recompressor::TtRounding,
            0,
            &Limits::default(),
            &mut FlopLedger::new(),
        );
        assert!(matches!(err, Err(Error::Convergence(_))));
    }

    #[test]
    fn brute_force_ties_and_spikes() {
        let lim = Limits::default();
        let ones = DenseTensor::from_fn(Shape::uniform(3, 2).unwrap(), &lim, |_| 1.0f64).unwrap();
        assert_eq!(brute_force_max(&ones).unwrap(), (1.0, vec![1, 1, 1]));
        let spike = DenseTensor::from_fn(Shape::uniform(3, 3).unwrap(), &lim, |i| {
            if i == [2, 3, 1] {
                5.0f64
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(brute_force_max(&spike).unwrap(), (5.0, vec![2, 3, 1]));
    }
}
