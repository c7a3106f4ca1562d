//! Dense linear algebra and reproducible random streams.
//!
//! Everything here is deterministic: the same inputs produce bit-identical
//! outputs regardless of how many worker threads the caller uses.

mod linalg;
mod random;
mod tridiag;

pub use linalg::{
    spd_solve, spd_trace_inverse, symmetric_eigenvalues, tridiagonalize, CholeskyFactor,
    SpdSystem,
};
pub use random::{make_stream, RandomStream};
pub use tridiag::{symtri_eigen, symtri_eigen_full, SymmetricTridiagonal};
