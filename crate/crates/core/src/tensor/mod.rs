//! Dense and TT tensor types, index conventions and tensor products.

mod cores;
mod dense;
pub mod io;
mod shape;
mod train;

pub use cores::{pkp_cores, pkp_cores_with_limits, pkp_stats, reset_pkp_stats, PkpStats, TtCore};
pub use dense::{contract_mode1, hadamard_dense, kron_dense, DenseTensor};
pub use shape::{
    mat_vector, multi_index, multi_index_inv, vec_matrix, Limits, RankChain, Shape,
    DEFAULT_DENSE_CAP, DENSE_CAP_ENV,
};
pub use train::{
    partial_contracted_product, relative_error, relative_error_dense, tt_add, tt_dot, tt_hadamard,
    tt_hadamard_with_limits, tt_inner3, tt_norm, tt_scale, tt_to_dense, tt_to_dense_with_limits,
    Orthogonality, TtTensor,
};
