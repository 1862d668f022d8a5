//! Exact and floating linear algebra over a symplectic lattice.

pub mod mat;
pub mod scalar;
pub mod subspace;

pub use mat::Mat;
pub use scalar::{Backend, GaussRational, Scalar};
pub use subspace::{subspace_close, SympSpace, Subspace};
