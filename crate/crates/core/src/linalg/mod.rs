//! Dense linear algebra over any [`Scalar`](crate::Scalar) with exact
//! operation counting.

mod counter;
mod dense;
mod lu;

pub use counter::FlopCounter;
pub use dense::{mat_lincomb, mat_mat, mat_vec, norm, vec_axpy, vec_lincomb, Matrix, NormKind, Vector};
pub use lu::{lu_decompose, pivot_floor_digits, LuFactors};
pub(crate) use dense::check_dim as check_len;
