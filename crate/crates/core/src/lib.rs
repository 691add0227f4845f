//! Numerical toolkit for deciding and approximating separability of
//! bipartite quantum states through symmetric extensions.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod applications;
pub mod bounds;
pub mod extension;
pub mod hermitian;
pub mod optimality;
pub mod sdp;
pub mod symmetric;

pub use error::{Error, Result};
pub use hermitian::{CMatrix, HermitianOperator, NormKind, C64};
pub use symmetric::{sym_dim, SymmetricBasis};
