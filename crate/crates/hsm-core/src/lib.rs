//! Hard-core lattice gas toolkit.
//!
//! The library has three layers:
//!
//! * exact primitives for the hard-core model on small graphs
//!   ([`hardcore`]): independent-set enumeration, partition functions,
//!   Gibbs distributions, and clique/block covers;
//! * Markov chains over independent sets ([`dynamics`]) together with
//!   exact transition matrices, mixing times, and spectral gaps, plus a
//!   sampling-based partition-function estimator ([`estimator`]);
//! * numerical diagnostics for the structural results the estimator
//!   rests on ([`spectral`]): pairwise influence matrices, self-avoiding-walk
//!   trees, the weighted simplicial-complex representation of clique covers,
//!   and the eigenvalue bounds that relate them.
//!
//! The [`hs`] module discretizes a continuous hard-sphere gas in a box onto
//! an integer grid so that the hard-core machinery (and the estimator)
//! applies to it.

pub mod dynamics;
pub mod error;
pub mod estimator;
pub mod hardcore;
pub mod hs;
pub mod spectral;
mod util;

pub use error::{Error, Result};
