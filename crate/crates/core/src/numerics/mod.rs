//! Self-contained numerical kernels used by the physics modules.

mod fit;
mod hermitian;
mod peaks;
mod roots;
mod tridiagonal;

pub use fit::{linear_fit, LinearFit};
pub use hermitian::{eigh_hermitian_small, HermitianEigen, HermitianMatrix, HERMITICITY_TOL};
pub use peaks::{local_maxima, refine_peak, LocalMax, RefinedPeak};
pub use roots::{find_roots, ROOT_TOL};
pub use tridiagonal::{
    eigh_tridiagonal, EigenPair, TridiagonalEigen, TridiagonalMatrix, Which,
    QUASI_DEGENERATE_FACTOR,
};
