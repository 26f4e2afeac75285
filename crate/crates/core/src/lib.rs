//! Graph energy, vertex energy and the cooperative energy game.
//!
//! The energy of a graph is the trace norm of its adjacency matrix, and the
//! energy of a vertex is the matching diagonal entry of `|A|`. Taking the
//! energy of every induced subgraph gives a transferable-utility game whose
//! players are the vertices. This crate computes those quantities for small
//! graphs (p-Schatten generalisation included), Shapley values, core
//! certificates, and a validator for the inequalities the game satisfies.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, sweeps and the
//! command-line tool live in the `energame` crate.

#![no_std]

extern crate alloc;

pub mod bounds;
pub mod enumerate;
mod error;
pub mod game;
pub mod graph;
pub mod rng;
pub mod spectral;
pub mod tol;

pub use error::Error;
pub use graph::{Graph, InducedSubgraph, VertexSet};
pub use spectral::{EnergyProfile, Spectrum};
pub use tol::Tolerances;

pub type Result<T, E = Error> = core::result::Result<T, E>;
