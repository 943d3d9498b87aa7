//! Test problems, TT-SVD and the largest-entry power iteration.

mod generators;
mod power;
mod ttsvd;

pub use generators::{
    fourier_tt, hilbert_tt, separable_tt, FourierSpec, FunctionKind, SeparableSpec,
    FOURIER_COEFF_RANGE,
};
pub use power::{
    brute_force_max, marginal_argmax, power_iteration_max, PowerIterResult, POWER_STOP_TOL,
};
pub use ttsvd::{tt_svd, Truncation};
