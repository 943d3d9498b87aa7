//! Seeded random TT tensors.
//!
//! Each core `k` draws from its own ChaCha8 stream (`seed`, stream `k`), so
//! adding or removing trailing cores never changes the earlier ones. Samples
//! are drawn in `f64` and converted, which keeps `f32` and `f64` tensors from
//! the same seed consistent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{shape_err, Result};
use crate::tensor::{RankChain, Shape, TtCore, TtTensor};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Core `k` entries are `N(0, 1/(ℓ_{k−1} n_k ℓ_k))`.
    Gaussian,
    /// Entries uniform on `[0, 1]`.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSpec {
    pub shape: Shape,
    pub ranks: RankChain,
    pub kind: Distribution,
    pub seed: u64,
}

impl RandomSpec {
    pub fn gaussian(shape: Shape, ranks: RankChain, seed: u64) -> Self {
        Self {
            shape,
            ranks,
            kind: Distribution::Gaussian,
            seed,
        }
    }

    pub fn uniform(shape: Shape, ranks: RankChain, seed: u64) -> Self {
        Self {
            shape,
            ranks,
            kind: Distribution::Uniform,
            seed,
        }
    }
}

pub fn random_tt<T: Scalar>(spec: &RandomSpec) -> Result<TtTensor<T>> {
    let d = spec.shape.order();
    if spec.ranks.order() != d {
        return shape_err(format!(
            "rank chain {} does not fit an order-{d} tensor",
            spec.ranks
        ));
    }
    let r = spec.ranks.as_slice();
    let cores = (0..d)
        .map(|k| {
            random_core(
                r[k],
                spec.shape.dims()[k],
                r[k + 1],
                spec.kind,
                spec.seed,
                k as u64,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    TtTensor::new(cores)
}

fn random_core<T: Scalar>(
    left: usize,
    mode: usize,
    right: usize,
    kind: Distribution,
    seed: u64,
    stream: u64,
) -> Result<TtCore<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let count = left * mode * right;
    let data: Vec<T> = match kind {
        Distribution::Gaussian => {
            let sd = (1.0 / count as f64).sqrt();
            (0..count)
                .map(|_| T::of(rng.sample::<f64, _>(StandardNormal) * sd))
                .collect()
        }
        Distribution::Uniform => (0..count).map(|_| T::of(rng.random::<f64>())).collect(),
    };
    TtCore::new(left, mode, right, data)
}
