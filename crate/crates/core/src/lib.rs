//! Tensor-train (TT) arithmetic and recompression of Hadamard products.
//!
//! The crate is organised bottom-up:
//!
//! - [`tensor`]: dense tensors, TT cores and TT tensors, index conventions,
//!   foldings, Kronecker/Hadamard/partial-Kronecker products and contractions.
//! - [`linalg`]: a small column-major matrix type with Householder QR, LQ,
//!   one-sided Jacobi SVD and the Kronecker-vec identity, all charging their
//!   cost to a [`FlopLedger`].
//! - [`random`]: seeded Gaussian and uniform random TT tensors.
//! - [`recompress`]: TT-Rounding, right-to-left partial contraction,
//!   RandOrth, the Hadamard partial contraction (HPCRL) and HaTT, plus the
//!   closed-form flop model.
//! - [`apps`]: TT-SVD, test-problem generators and power iteration for the
//!   largest tensor element.
//! - [`bench`]: experiment runners producing CSV result rows.
//!
//! Everything numeric is generic over [`Scalar`] (implemented for `f32` and
//! `f64`); the `*64` / `*32` aliases below name the concrete instantiations.
//!
//! Index conventions: element-level tensor accessors (`DenseTensor::get`,
//! `TtCore::get`, `multi_index`) are 1-based with the last index running
//! fastest. [`Matrix`] is a 0-based, column-major linear algebra kernel type,
//! and matrix vectorisation stacks columns.

pub mod apps;
pub mod bench;
pub mod error;
pub mod linalg;
pub mod random;
pub mod recompress;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use linalg::{FlopLedger, Matrix};
pub use scalar::Scalar;
pub use tensor::{DenseTensor, Limits, RankChain, Shape, TtCore, TtTensor};

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type DenseTensor64 = DenseTensor<f64>;
pub type DenseTensor32 = DenseTensor<f32>;
pub type TtCore64 = TtCore<f64>;
pub type TtCore32 = TtCore<f32>;
pub type TtTensor64 = TtTensor<f64>;
pub type TtTensor32 = TtTensor<f32>;
