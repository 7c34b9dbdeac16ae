//! Single-shot thermodynamics for block-diagonal (classical) states.
//!
//! States are finite probability vectors ([`Dist`]); Hamiltonians are energy
//! vectors bundled with an inverse temperature ([`ThermalContext`]). On top of
//! that the crate provides
//!
//! * Rényi entropies, Burg entropy, Rényi divergences and α-free energies
//!   ([`entropy`]),
//! * majorization, T-transform witnesses and trumping checks ([`majorization`]),
//! * thermal Lorenz curves, thermomajorization and minimal work ([`thermo`]),
//! * the correlated extension `q_AB` with its closed-form entropy balance, and
//!   the search for extension parameters ([`catalysis`]),
//! * embedding maps, the simplex-shrinking map and the formation / extraction
//!   pipelines assembled from them ([`protocols`]),
//! * the hard-coded qubit and three-level scenarios ([`scenarios`]).
//!
//! Everything is available without `std`; only `alloc` is required. Numeric
//! code that has to be exact is generic over [`Scalar`], implemented for `f64`
//! and for [`Rational`].
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod catalysis;
pub mod dist;
pub mod entropy;
mod error;
pub mod extended;
pub mod grid;
mod lp;
pub mod majorization;
pub mod math;
pub mod protocols;
pub mod scalar;
pub mod scenarios;
pub mod stochastic;
pub mod thermo;
pub mod tolerance;

pub use dist::{mix, tensor, trace_distance, BipartiteDist, Dist};
pub use entropy::{Alpha, ThermalContext};
pub use error::{Error, Result};
pub use extended::ExtendedReal;
pub use grid::AlphaGrid;
pub use scalar::{Rational, Scalar};
pub use stochastic::{StochasticMatrix, TTransformChain};
pub use tolerance::Tolerances;
