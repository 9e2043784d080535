//! Numerical laboratory for threshold asymptotics of magnetic spectral shift
//! functions.
//!
//! The crate covers logarithmic capacity of planar sets, the angular-momentum
//! basis of the Landau Hamiltonian, Toeplitz compressions `p_q 1_O p_q` and
//! their eigenvalues, eigenvalue counting identities, the iterated-logarithm
//! profile `Phi_1`, effective potentials built from a cutoff, and the 1D
//! sandwiched resolvent kernels.
//!
//! Conventions fixed across the crate: `zeta = x1 + i x2`,
//! `d/dzeta = (d1 - i d2)/2`, Landau levels `Lambda_q = b(2q + 1)`, and
//! eigenvalue sequences stored in non-increasing order.

pub mod asymptotics;
pub mod capacity;
pub mod counting;
pub mod effective;
mod error;
pub mod geometry;
pub mod landau;
pub mod linalg;
pub mod quad;
pub mod resolvent;
pub mod special;
pub mod toeplitz;

pub use error::{Error, Result};
pub use num_complex::Complex64;
