//! Continuous-time quantum walks on edge-weighted graphs.
//!
//! The walk from a start vertex evolves as `psi(t) = exp(-i t A) e_start`, where `A`
//! is the weighted adjacency matrix. This crate provides:
//!
//! - [`graph`]: weighted graphs, named families, Cartesian products, JSON graph files.
//! - [`spectral`]: symmetric eigendecomposition, eigenvalue grouping and projectors.
//! - [`walk`]: exact evolution, instantaneous and time-averaged distributions.
//! - [`solvers`]: closed-form inverse solvers returning weights and a time at which the
//!   walk hits a prescribed distribution on `P3`, claws, complete bipartite and
//!   complete multipartite graphs, built on weighted path collapsing.
//! - [`analysis`]: uniform-mixing scans, Cartesian-product closure checks and
//!   average-mixing bounds.

pub mod analysis;
pub mod error;
pub mod graph;
#[cfg(test)]
mod oracle;
pub mod solvers;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{Family, PartitionedGraph, WeightedGraph};
pub use spectral::{SpectralDecomposition, DEFAULT_GROUPING_TOLERANCE};
pub use walk::{Distribution, QuantumWalk, WalkState};
