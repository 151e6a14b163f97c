//! Frustration-free nearest-neighbour spin chains that conserve fermion
//! parity, their Jordan-Wigner images as interacting Kitaev-type chains, and
//! exact-diagonalization checks of ground spaces, gaps and Majorana zero
//! modes.
//!
//! Modules build on each other in this order: [`hilbert`] (dense operators
//! and Pauli strings), [`hamiltonians`] (model families), [`jordan_wigner`],
//! [`spectral`], [`ground_space`], [`mzm`] and [`mps`].

pub mod error;
pub mod ground_space;
pub mod hamiltonians;
pub mod hilbert;
pub mod jordan_wigner;
pub mod mps;
pub mod mzm;
pub mod spectral;

pub use error::{Error, Result};
pub use hamiltonians::{parse_spec, Boundary, FFModelSpec, Family, ModelParams, Sublattice};
pub use hilbert::{OperatorMatrix, Pauli, PauliString, PauliSum};
pub use num_complex::Complex64 as C64;

/// Library version, echoed in CLI output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
