//! Symmetric linear-algebra kernel.
//!
//! Sparse matrices are only ever used through matrix-vector products (CG);
//! everything that needs a factorization is dense. One-dimensional problems
//! use the tridiagonal pencil solver in [`tridiag`].

mod cg;
mod dense;
mod eig;
mod sparse;
pub mod tridiag;

pub use cg::cg_solve;
pub use dense::{Cholesky, DenseSym};
pub use eig::{gen_sym_eig, sym_eig, Gram, Spectrum};
pub use sparse::{SparseSym, SparseSymBuilder};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
