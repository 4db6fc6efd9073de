//! Randomized-measurement moments and local-unitary invariants of two- and
//! three-qubit states.
//!
//! The exact engine ([`twirl`]) writes the local Haar twirl of `O^{⊗t}` in the
//! basis of permutation operators and contracts it against `ρ^{⊗t}`. The
//! Monte Carlo oracle ([`haar_mc`]) and the finite-shot protocol simulator
//! ([`protocol_sim`]) estimate the same moments by sampling. [`verify`]
//! bundles the numerical checks of the structural results into a report.

pub mod error;
pub mod haar_mc;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod observables;
pub mod protocol_sim;
pub mod rng;
pub mod states;
pub mod symgroup;
pub mod twirl;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
