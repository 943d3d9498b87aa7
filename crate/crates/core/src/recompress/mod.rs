//! Recompression of TT tensors and of implicit Hadamard products.
//!
//! Every routine takes a target rank chain `{ℓ_k}` fixed in advance and a
//! [`FlopLedger`] that accumulates the kernel costs of the run. Randomized
//! routines draw their Gaussian sketch tensor from a seed or accept one
//! directly.

mod hatt;
mod hpcrl;
mod model;
mod randorth;
mod rounding;
mod sketch;
mod targets;

use std::time::Instant;

pub use hatt::{contract_m_onto_pkp, hatt, hatt_with_sketch};
pub use hpcrl::{hpcrl, rank1_decompose, HpcrlVariant, Rank1Rep, DEFAULT_SVD_REL_TOL};
pub use model::{flop_model, flop_model_svd, hatt_crossover, Algorithm, ModelParams};
pub use randorth::{rand_orth, rand_orth_with_sketch};
pub use rounding::tt_rounding;
pub use sketch::{partial_contraction_rl, partial_contraction_rl_slices, SketchSet};
pub use targets::feasible_targets;

use crate::error::{Error, Result};
use crate::linalg::FlopLedger;
use crate::tensor::{
    relative_error, relative_error_dense, tt_hadamard_with_limits, DenseTensor, Limits, RankChain,
    TtTensor,
};
use crate::Scalar;

/// A recompression backend for Hadamard products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Recompressor {
    /// Materialize the product, then round deterministically.
    TtRounding,
    /// Materialize the product, then randomize-then-orthogonalize.
    RandOrth,
    /// Work from the factors directly.
    Hatt(HpcrlVariant),
}

impl Recompressor {
    /// Parses `tt-rounding`, `rand-orth`, `hatt-1` or `hatt-2`; `max_terms`
    /// only applies to `hatt-1`.
    pub fn parse(name: &str, max_terms: Option<usize>) -> Result<Self> {
        match name.parse::<Algorithm>()? {
            Algorithm::TtRounding => Ok(Self::TtRounding),
            Algorithm::RandOrth => Ok(Self::RandOrth),
            Algorithm::Hatt1 => Ok(Self::Hatt(HpcrlVariant::svd(max_terms))),
            Algorithm::Hatt2 => Ok(Self::Hatt(HpcrlVariant::Direct)),
            other => Err(Error::Usage(format!(
                "{other} is modelled but not implemented"
            ))),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Self::TtRounding => Algorithm::TtRounding,
            Self::RandOrth => Algorithm::RandOrth,
            Self::Hatt(HpcrlVariant::Direct) => Algorithm::Hatt2,
            Self::Hatt(HpcrlVariant::Svd { .. }) => Algorithm::Hatt1,
        }
    }

    pub fn max_terms(&self) -> Option<usize> {
        match self {
            Self::Hatt(HpcrlVariant::Svd { max_terms, .. }) => *max_terms,
            _ => None,
        }
    }

    /// Recompresses `y ⊙ z` to `targets`. The baselines build the product
    /// first and fail with a resource error when a product core exceeds
    /// `limits.core_elements`.
    pub fn hadamard<T: Scalar>(
        &self,
        y: &TtTensor<T>,
        z: &TtTensor<T>,
        targets: &RankChain,
        seed: u64,
        limits: &Limits,
        ledger: &mut FlopLedger,
    ) -> Result<TtTensor<T>> {
        match self {
            Self::TtRounding => {
                tt_rounding(&tt_hadamard_with_limits(y, z, limits)?, targets, ledger)
            }
            Self::RandOrth => rand_orth(
                &tt_hadamard_with_limits(y, z, limits)?,
                targets,
                seed,
                ledger,
            ),
            Self::Hatt(variant) => hatt(y, z, targets, *variant, seed, ledger),
        }
    }
}

/// What one recompression run produced and cost.
#[derive(Debug, Clone)]
pub struct RecompressReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub output_ranks: RankChain,
    pub rel_error: Option<f64>,
    pub wall_time_s: f64,
    pub flops_measured: FlopLedger,
    pub flops_predicted: u64,
}

/// Reference against which a run's relative error is measured.
pub enum Reference<'a, T> {
    Tt(&'a TtTensor<T>),
    Dense(&'a DenseTensor<T>, Limits),
}

/// Cost-model parameters describing `y ⊙ z` recompressed to `targets`.
pub fn model_params<T: Scalar>(
    y: &TtTensor<T>,
    z: &TtTensor<T>,
    targets: &RankChain,
    terms: Option<usize>,
) -> ModelParams {
    ModelParams {
        d: y.order(),
        n: y.shape().dims().iter().copied().max().unwrap_or(1),
        r: y.ranks().max(),
        s: z.ranks().max(),
        ell: targets.max(),
        terms,
    }
}

/// Runs `recompressor` on `y ⊙ z`, timing it and measuring the error
/// against `reference` when one is given.
pub fn run_hadamard<T: Scalar>(
    recompressor: Recompressor,
    y: &TtTensor<T>,
    z: &TtTensor<T>,
    targets: &RankChain,
    seed: u64,
    limits: &Limits,
    reference: Option<Reference<'_, T>>,
) -> Result<(TtTensor<T>, RecompressReport)> {
    let mut ledger = FlopLedger::new();
    let start = Instant::now();
    let out = recompressor.hadamard(y, z, targets, seed, limits, &mut ledger)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let rel_error = match reference {
        Some(Reference::Tt(x)) => Some(relative_error(&out, x)?.as_f64()),
        Some(Reference::Dense(x, lim)) => Some(relative_error_dense(&out, x, &lim)?.as_f64()),
        None => None,
    };
    let algorithm = recompressor.algorithm();
    let params = model_params(y, z, targets, recompressor.max_terms());
    let report = RecompressReport {
        algorithm,
        seed,
        output_ranks: out.ranks(),
        rel_error,
        wall_time_s,
        flops_measured: ledger,
        flops_predicted: flop_model(algorithm, &params)?,
    };
    Ok((out, report))
}
