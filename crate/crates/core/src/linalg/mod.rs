//! Dense matrix kernels with flop accounting.
//!
//! Costs follow the usual dense-kernel conventions: an `m×n` by `n×r`
//! product costs `m(2n−1)r`, an economy QR of an `m×n` matrix (`m ≥ n`)
//! costs `4mn² − 4n³/3`, and a thin SVD is charged to a separate bucket as
//! [`SVD_FLOP_CONSTANT`]`·m·n²` because its true cost is iteration dependent.

mod flops;
mod kron;
pub(crate) mod matrix;
mod qr;
mod svd;

pub use flops::{FlopLedger, SVD_FLOP_CONSTANT};
pub use kron::{kron_apply_vec, kron_matrix};
pub use matrix::{matmul, matmul_nt, matmul_tn, Matrix};
pub use qr::{econ_qr, lq, LqResult, QrResult};
pub use svd::{truncated_svd, SvdOptions, SvdResult};
