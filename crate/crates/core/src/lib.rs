//! Eigenstates of the generalized h(1)⊕su(2) annihilator with complex-matrix
//! eigenvalues, realized on a truncated Fock space.
//!
//! Module layout (bottom-up):
//! - [`linops`]: dense complex matrices, Kronecker products, eig, expm.
//! - [`fock`]: ladder operators, coherent states, displacement, squeeze lift.
//! - [`su2`]: spin-j generators, β-parameter classification, the T operator.
//! - [`algebra`]: the tensor operator 𝔸, commutator scenarios, transformed generators.
//! - [`aes`]: scalar algebra eigenstates, one per case family.
//! - [`vaes`]: vector eigenstates with matrix eigenvalue M̃ and the named VCS families.
//! - [`quaternion`]: quaternionic M̃ and the K=2 passing matrix.
//! - [`verify`]: residuals, Schrödinger–Robertson check, su(2) relation check.

pub mod aes;
pub mod algebra;
pub mod error;
pub mod fock;
pub mod linops;
pub mod quaternion;
pub mod su2;
pub mod vaes;
pub mod verify;

mod combin;

pub use error::{Result, VaesError};
pub use linops::{CMatrix, C64};

/// Shorthand for building a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
