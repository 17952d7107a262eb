//! Finite-dimensional simulator of the von Neumann measurement
//! description of a two-station Bell experiment.
//!
//! A polarization-entangled biphoton interacts with one apparatus pointer
//! per station through H = λ·(observable)⊗(pointer momentum); the joint
//! unitary evolution entangles photons and pointers, and tracing out the
//! photons leaves a pointer density matrix whose readout reproduces the
//! cos²/sin² outcome law. The engine evolves the system by three
//! independent methods and quantifies the role of the locality condition
//! [H_A, H_B] = 0 through commutator, factorization-gap and order-swap
//! diagnostics, including a deliberately nonlocal counterexample.

// force the BLAS/LAPACK provider into the link line
use openblas_src as _;

pub mod cli;
pub mod engine;
pub mod error;
pub mod layout;
pub mod linalg;
pub mod photon;
pub mod pointer;
pub mod stats;

pub use error::{Error, Result};
