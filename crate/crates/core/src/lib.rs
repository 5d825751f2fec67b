//! Matrix-free simulation of central spins coupled to a spin-1/2 bath.
//!
//! The compound wavefunction is propagated either by a Chebyshev expansion of
//! `exp(−iHt)` ([`chebyshev`]) or by a second-order Suzuki-Trotter product
//! formula ([`trotter`]). The Hamiltonian is never stored as a matrix: every
//! term acts on the state through bit operations on the basis index
//! ([`hilbert`]).

pub mod chebyshev;
pub mod error;
pub mod hilbert;
pub mod model;
pub mod observables;
pub mod trotter;

pub use error::{Error, Result};
pub use hilbert::{Axis, Basis, HamiltonianTerm, StateVector};
pub use model::{SpectralBound, SpinModel};
