//! Spectral statistics of disordered superconducting-qubit arrays.
//!
//! The crate builds charge-basis Hamiltonians for transmons and capacitively
//! shunted flux qubits (CSFQs), assembles fixed-excitation-sector Hamiltonians
//! for coupled qubit arrays and (generalized) Bose-Hubbard models, and measures
//! where the spectrum crosses over from localized (Poisson) to chaotic (GOE)
//! level statistics as the coupling grows.
//!
//! Energies are frequencies `E/h` in GHz unless a caller chooses its own unit
//! (the Bose-Hubbard sweeps are usually run in units of `|U|`).

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod crossover;
pub mod eigensolve;
pub mod error;
pub mod fock_basis;
pub mod hamiltonian;
pub mod lattice;
pub mod levelstats;
pub mod matrix;
pub mod optimize;
pub mod quadrature;
pub mod qubit_models;
pub mod rng;
pub mod three_site;

pub use error::{Error, Result};
pub use matrix::SymmetricMatrix;
