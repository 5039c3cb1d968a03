//! Simulation and pulse synthesis for finite-dimensional quantum systems under
//! time-dependent non-Hermitian Hamiltonians.
//!
//! A complete orthonormal ancillary frame `|μ_k(t)⟩` rotates the generator
//! into `𝓗 − 𝒜`. When that matrix is lower triangular, the last frame vector
//! is an exact ket-space passage and the first one an exact bra-space passage;
//! the system follows them up to a complex phase whose imaginary part
//! controls the norm.

pub mod dynamics;
pub mod dyson;
pub mod error;
pub mod frame;
pub mod linalg;
pub mod scenario;
pub mod smooth;
pub mod synthesis;

pub use error::{Error, Result};
